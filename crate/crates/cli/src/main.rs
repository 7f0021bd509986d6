use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use gkm::cohomology::{self, hd_bf, hd_br, hd_r, GradedZAlgebra, HDPolynomial, IdealZ};
use gkm::families::{reproduce_thm12_cycle, reproduce_thm13, Family, FamilyError};
use gkm::toric::{
    check_external_monodromy, find_isomorphism, gkm_from_charpair, polytope_face_subgraph,
    search_obstruction, unique_connection, CharPair, CharPairJson, ObstructionWitness, Preset,
};
use gkm::weightgraph::{validate_axial, WeightHypergraph};

#[derive(Parser)]
#[command(
    name = "gkm",
    version,
    about = "Weight hypergraphs, monodromy obstructions and cohomology of BR/R hypersurfaces"
)]
struct Cli {
    /// Worker threads (overrides GKM_THREADS)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build the weight hypergraph of a family member (bf n | br i j | r i j | h i j)
    Family {
        kind: String,
        params: Vec<usize>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Search for a monodromy obstruction to a toric structure
    Obstruct {
        kind: String,
        params: Vec<usize>,
        #[arg(long, default_value_t = 6)]
        max_cycle_len: usize,
        #[arg(long, default_value_t = 64)]
        max_growth: usize,
        /// Face dimension for the face-exclusion search (default: all)
        #[arg(long)]
        face_dim: Option<usize>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Integral cohomology ring as a quotient by an annihilator (br i j | r i j)
    Cohomology {
        kind: String,
        params: Vec<usize>,
        /// Print the presentation: ambient ring and relations
        #[arg(long)]
        relations: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Even Betti numbers b^0, b^2, ... (bf n | br i j | r i j)
    Betti {
        kind: String,
        params: Vec<usize>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Characteristic pairs
    Toric {
        #[command(subcommand)]
        cmd: ToricCmd,
    },
    /// Write a family graph as JSON or DOT
    Export {
        kind: String,
        params: Vec<usize>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Output file (default: stdout)
        #[arg(short, long)]
        output: Option<String>,
    },
    /// Replay a non-toricity argument step by step (thm1.2 i j | thm1.3 i j)
    Reproduce {
        which: String,
        i: usize,
        j: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

#[derive(Subcommand)]
enum ToricCmd {
    /// Validate a characteristic pair and its external-edge monodromy
    Check {
        /// JSON file {facets, dim, vertices, lambda}
        file: Option<String>,
        /// Built-in pair: br21, br22, r22, r13
        #[arg(long)]
        preset: Option<String>,
        #[arg(long, default_value_t = 8)]
        max_cycle_len: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Print a built-in characteristic pair as JSON
    Preset { name: String },
}

/// Failure classes mapped to exit codes.
enum Fail {
    Usage(String),
    Internal(String),
}

impl From<FamilyError> for Fail {
    fn from(e: FamilyError) -> Self {
        match e {
            FamilyError::InvalidParams(s) => Fail::Usage(s),
            other => Fail::Internal(other.to_string()),
        }
    }
}

impl From<cohomology::CohomologyError> for Fail {
    fn from(e: cohomology::CohomologyError) -> Self {
        match e {
            cohomology::CohomologyError::InvalidParams(s) => Fail::Usage(s),
            other => Fail::Internal(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli.threads.or_else(|| {
        std::env::var("GKM_THREADS")
            .ok()
            .and_then(|s| s.parse().ok())
    });
    if let Some(n) = threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
    let mut out = String::new();
    let code = match run(cli.cmd, &mut out) {
        Ok(code) => code,
        Err(Fail::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Fail::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            3
        }
    };
    let _ = std::io::stdout().write_all(out.as_bytes());
    ExitCode::from(code)
}

fn family(kind: &str, params: &[usize]) -> Result<(Family, WeightHypergraph), Fail> {
    let f = Family::from_parts(kind, params)?;
    let g = f.graph()?;
    Ok((f, g))
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialize") + "\n"
}

fn run(cmd: Cmd, out: &mut String) -> Result<u8, Fail> {
    match cmd {
        Cmd::Family {
            kind,
            params,
            format,
        } => {
            let (f, g) = family(&kind, &params)?;
            *out += &match format {
                Format::Json => {
                    pretty(&serde_json::to_value(g.to_json()).expect("graph serializes"))
                }
                Format::Dot => g.to_dot(&f.to_string()),
                Format::Text => describe_graph(&f, &g),
            };
            Ok(0)
        }
        Cmd::Export {
            kind,
            params,
            format,
            output,
        } => {
            let (f, g) = family(&kind, &params)?;
            let s = match format {
                Format::Dot => g.to_dot(&f.to_string()),
                _ => pretty(&serde_json::to_value(g.to_json()).expect("graph serializes")),
            };
            match output {
                Some(path) => {
                    fs::write(&path, s).map_err(|e| Fail::Usage(format!("{path}: {e}")))?
                }
                None => *out += &s,
            }
            Ok(0)
        }
        Cmd::Obstruct {
            kind,
            params,
            max_cycle_len,
            max_growth,
            face_dim,
            format,
        } => {
            let (f, g) = family(&kind, &params)?;
            let report = validate_axial(&g);
            if !report.is_empty() {
                return Err(Fail::Internal(format!("{f} fails validation: {report}")));
            }
            let res = search_obstruction(&g, max_cycle_len, max_growth, face_dim);
            if let Some(w) = &res.witness {
                w.replay(&g).map_err(|e| Fail::Internal(e.to_string()))?;
            }
            let verdict = if res.witness.is_some() {
                "NOT TORIC (obstruction found)"
            } else {
                "no obstruction found (consistent with toric)"
            };
            match format {
                Format::Json => {
                    *out += &pretty(&json!({
                        "family": f.to_string(),
                        "verdict": verdict,
                        "witness": res.witness,
                        "inconclusive": res.inconclusive,
                    }))
                }
                _ => {
                    *out += &format!("{f}: {verdict}\n");
                    if let Some(w) = &res.witness {
                        *out += &w.to_text();
                    }
                    if res.witness.is_none() && res.inconclusive > 0 {
                        *out += &format!(
                            "inconclusive: {} face closures hit --max-growth\n",
                            res.inconclusive
                        );
                    }
                }
            }
            Ok(if res.witness.is_some() { 0 } else { 1 })
        }
        Cmd::Cohomology {
            kind,
            params,
            relations,
            format,
        } => {
            let (name, (ambient, ann, q)) = match (kind.as_str(), params.as_slice()) {
                ("br", [i, j]) => (
                    format!("BR_{{{i},{j}}}"),
                    cohomology::br_cohomology(*i, *j)?,
                ),
                ("r", [i, j]) => (format!("R_{{{i},{j}}}"), cohomology::r_cohomology(*i, *j)?),
                _ => return Err(Fail::Usage("cohomology takes `br i j` or `r i j`".into())),
            };
            let rels: Vec<String> = ann
                .generating_set(&ambient)
                .iter()
                .map(|e| ambient.format(e))
                .collect();
            match format {
                Format::Json => {
                    let mut v = json!({
                        "space": name,
                        "graded_ranks": q.graded_ranks(),
                        "ring": q.to_json(),
                    });
                    if relations {
                        v["ambient_generators"] = json!(ambient
                            .generators()
                            .iter()
                            .map(|(n, _)| n.clone())
                            .collect::<Vec<_>>());
                        v["relations"] = json!(rels);
                    }
                    *out += &pretty(&v);
                }
                _ => *out += &describe_ring(&name, &ambient, &ann, &q, relations, &rels),
            }
            Ok(0)
        }
        Cmd::Betti {
            kind,
            params,
            format,
        } => {
            let p: HDPolynomial = match (kind.as_str(), params.as_slice()) {
                ("bf", [n]) => hd_bf(*n),
                ("br", [i, j]) => hd_br(*i, *j)?,
                ("r", [i, j]) => hd_r(*i, *j)?,
                _ => {
                    return Err(Fail::Usage(
                        "betti takes `bf n`, `br i j` or `r i j`".into(),
                    ))
                }
            };
            let b = cohomology::betti_from_hd(&p);
            match format {
                Format::Json => {
                    *out += &pretty(&json!({ "betti": b, "hodge_deligne": p.to_string() }))
                }
                _ => {
                    *out += &(b
                        .iter()
                        .map(|x| x.to_string())
                        .collect::<Vec<_>>()
                        .join(" ")
                        + "\n")
                }
            }
            Ok(0)
        }
        Cmd::Toric { cmd } => toric(cmd, out),
        Cmd::Reproduce {
            which,
            i,
            j,
            format,
        } => {
            let witnesses: Vec<ObstructionWitness> = match which.as_str() {
                "thm1.2" => {
                    if !(i > j && j >= 2) {
                        return Err(Fail::Usage("thm1.2 needs i > j ≥ 2".into()));
                    }
                    (0..=j - 2)
                        .map(|k| reproduce_thm12_cycle(i, j, k))
                        .collect::<Result<_, _>>()?
                }
                "thm1.3" => vec![reproduce_thm13(i, j)?],
                _ => {
                    return Err(Fail::Usage(format!(
                        "unknown replay `{which}` (thm1.2 or thm1.3)"
                    )))
                }
            };
            match format {
                Format::Json => {
                    *out +=
                        &pretty(&json!({ "replay": which, "i": i, "j": j, "witnesses": witnesses }))
                }
                _ => {
                    for w in &witnesses {
                        *out += &w.to_text();
                    }
                    *out += "replay OK: every step agrees with forced transport\n";
                }
            }
            Ok(0)
        }
    }
}

fn toric(cmd: ToricCmd, out: &mut String) -> Result<u8, Fail> {
    match cmd {
        ToricCmd::Preset { name } => {
            let p = Preset::from_name(&name)
                .ok_or_else(|| Fail::Usage(format!("unknown preset `{name}`")))?;
            *out += &pretty(
                &serde_json::to_value(p.charpair().to_json()).expect("charpair serializes"),
            );
            Ok(0)
        }
        ToricCmd::Check {
            file,
            preset,
            max_cycle_len,
            format,
        } => {
            let (cp, family) = match (file, preset) {
                (Some(path), None) => {
                    let s = fs::read_to_string(&path)
                        .map_err(|e| Fail::Usage(format!("{path}: {e}")))?;
                    let j: CharPairJson = serde_json::from_str(&s)
                        .map_err(|e| Fail::Usage(format!("{path}: {e}")))?;
                    (
                        CharPair::from_json(&j).map_err(|e| Fail::Usage(e.to_string()))?,
                        None,
                    )
                }
                (None, Some(name)) => {
                    let p = Preset::from_name(&name)
                        .ok_or_else(|| Fail::Usage(format!("unknown preset `{name}`")))?;
                    (p.charpair(), Some(p.family()))
                }
                _ => return Err(Fail::Usage("give either a JSON file or --preset".into())),
            };
            let (g, c) = gkm_from_charpair(&cp).map_err(|e| Fail::Usage(e.to_string()))?;
            let axial = validate_axial(&g);
            let unique = unique_connection(&g).map(|u| u == c).unwrap_or(false);
            let poly = cp.polytope();
            let mut faces = 0;
            let mut bad_faces = Vec::new();
            for codim in 1..poly.dim() {
                for face in poly.faces_of_codim(codim) {
                    faces += 1;
                    let sub = polytope_face_subgraph(&g, poly, &face);
                    if !check_external_monodromy(&g, &c, &sub, max_cycle_len) {
                        bad_faces.push(face.iter().copied().collect::<Vec<_>>());
                    }
                }
            }
            let iso = family.map(|f| {
                let fg = f.graph().ok();
                (
                    f.to_string(),
                    fg.and_then(|fg| find_isomorphism(&fg, &g)).is_some(),
                )
            });
            let ok = axial.is_empty()
                && unique
                && bad_faces.is_empty()
                && iso.as_ref().is_none_or(|(_, b)| *b);
            match format {
                Format::Json => {
                    *out += &pretty(&json!({
                        "unimodular": true,
                        "vertices": g.num_vertices(),
                        "edges": g.edges().len() / 2,
                        "axial_violations": axial.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                        "unique_connection": unique,
                        "faces_checked": faces,
                        "monodromy_failures": bad_faces,
                        "h_polynomial": poly.h_polynomial().coeffs,
                        "family_isomorphic": iso.as_ref().map(|(n, b)| json!({ "family": n, "isomorphic": b })),
                        "ok": ok,
                    }))
                }
                _ => {
                    *out += &cp.to_string();
                    *out += "minors: all unimodular\n";
                    *out += &format!(
                        "GKM graph: {} vertices, {} edges\n",
                        g.num_vertices(),
                        g.edges().len() / 2
                    );
                    *out += &format!(
                        "axial function: {}\n",
                        if axial.is_empty() {
                            "ok".to_string()
                        } else {
                            axial.to_string()
                        }
                    );
                    *out += &format!("face connection = forced connection: {}\n", yes(unique));
                    *out += &format!(
                        "external-edge monodromy on {faces} proper faces (cycles ≤ {max_cycle_len}): {}\n",
                        if bad_faces.is_empty() { "identity".to_string() } else { format!("fails on {bad_faces:?}") }
                    );
                    *out += &format!(
                        "h-vector: {}\n",
                        poly.h_polynomial()
                            .coeffs
                            .iter()
                            .map(|x| x.to_string())
                            .collect::<Vec<_>>()
                            .join(" ")
                    );
                    if let Some((n, b)) = &iso {
                        *out += &format!("isomorphic to the {n} weight hypergraph: {}\n", yes(*b));
                    }
                }
            }
            Ok(if ok { 0 } else { 3 })
        }
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn describe_graph(f: &Family, g: &WeightHypergraph) -> String {
    let hyper = g.hyperedges().iter().filter(|h| h.dim > 1).count();
    let mut s = format!(
        "{f}: rank {}, valence {}, {} vertices, {} edges, {} hyperedges\n",
        g.rank(),
        g.valence(),
        g.num_vertices(),
        g.hyperedges().len() - hyper,
        hyper
    );
    for v in g.vertices_by_label() {
        let star: Vec<String> = g
            .star(v)
            .iter()
            .map(|&d| {
                let far: BTreeSet<&str> = g.hyperedges()[d.he]
                    .vertices
                    .iter()
                    .filter(|&&x| x != v)
                    .map(|&x| g.label(x))
                    .collect();
                let far: Vec<&str> = far.into_iter().collect();
                let tag = if g.is_edge(d) {
                    String::new()
                } else {
                    format!(" [dim {}]", g.dim(d))
                };
                format!("{} {}{tag}", far.join("|"), g.alpha(d))
            })
            .collect();
        s += &format!("  {}: {}\n", g.label(v), star.join("; "));
    }
    let report = validate_axial(g);
    s += &format!(
        "validation: {}\n",
        if report.is_empty() {
            "ok".to_string()
        } else {
            report.to_string()
        }
    );
    s
}

fn describe_ring(
    name: &str,
    ambient: &GradedZAlgebra,
    ann: &IdealZ,
    q: &GradedZAlgebra,
    relations: bool,
    rels: &[String],
) -> String {
    let ranks = |r: Vec<usize>| {
        r.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mut s = format!(
        "H*({name}; Z): rank {}, graded ranks {}\n",
        q.rank(),
        ranks(q.graded_ranks())
    );
    if relations {
        let gens: Vec<String> = ambient
            .generators()
            .iter()
            .map(|(n, _)| n.clone())
            .collect();
        s += &format!(
            "ambient: Z[{}] (rank {})\n",
            gens.join(", "),
            ambient.rank()
        );
        s += &format!("annihilator ideal: rank {}, generated by\n", ann.rank());
        for r in rels {
            s += &format!("  {r}\n");
        }
        s += &format!("basis: {}\n", q.names().join(", "));
    }
    s
}

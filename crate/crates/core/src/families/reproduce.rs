use super::{
    br_graph, br_partial_connection, r_graph, r_partial_connection, FamilyError, FlagIndex,
};
use crate::toric::{ObstructionWitness, StarRef, TransportStep, WitnessKind};
use crate::weightgraph::{forced_transport, Connection, WeightHypergraph};

fn check_params(i: usize, j: usize) -> Result<(), FamilyError> {
    if !(i > j && j >= 2) {
        return Err(FamilyError::InvalidParams(
            "the replay needs i > j ≥ 2".into(),
        ));
    }
    Ok(())
}

/// Check ∇_along(source) = target against both the closed-form table and
/// the forced transport, and record it.
fn expect_step(
    g: &WeightHypergraph,
    table: &Connection,
    n: usize,
    along: &StarRef,
    source: &StarRef,
    target: &StarRef,
) -> Result<TransportStep, FamilyError> {
    let e = g.dir_edge_by_label(&along.at, &along.toward)?;
    let x = g.dir_edge_by_label(&source.at, &source.toward)?;
    let y = g.dir_edge_by_label(&target.at, &target.toward)?;
    if !crate::toric::is_safe(g, e) {
        return Err(FamilyError::StepMismatch {
            step: n,
            expected: format!("{along} definite with independent weights"),
            found: "unsafe edge".into(),
        });
    }
    let forced = forced_transport(g, e)?;
    for (name, m) in [("table", table.get(e)), ("forced", Some(&forced))] {
        let got = m.and_then(|m| m.get(&x)).copied();
        if got != Some(y) {
            return Err(FamilyError::StepMismatch {
                step: n,
                expected: format!("{target}"),
                found: got.map_or(format!("no {name} value"), |d| {
                    format!("{} ({name})", StarRef::of(g, d))
                }),
            });
        }
    }
    Ok(TransportStep {
        along: along.clone(),
        source: source.clone(),
        target: target.clone(),
    })
}

/// The monodromy of γ_k = (E_{0,k}^{0,k+1}, E_{0,k+1}^{0,k+2},
/// E_{0,k+2}^{0,k}) in BR_{i,j} moves E_{0,k}^{1_{k+1+d},k} to
/// E_{0,k}^{1_{k+2+d},k}, d = i − j.
pub fn reproduce_thm12_cycle(
    i: usize,
    j: usize,
    k: usize,
) -> Result<ObstructionWitness, FamilyError> {
    check_params(i, j)?;
    if k + 2 > j {
        return Err(FamilyError::InvalidParams(format!(
            "k must be at most {}",
            j - 2
        )));
    }
    let g = br_graph(i, j)?;
    let table = br_partial_connection(i, j)?;
    let d = i - j;
    let zero = FlagIndex::zero(i);
    let x = |u: &FlagIndex, k: usize| format!("{u},{k}");
    let one = |q: usize| FlagIndex::ones(i, &[q]);
    let e = |a: String, b: String| StarRef { at: a, toward: b };
    let p = [x(&zero, k), x(&zero, k + 1), x(&zero, k + 2)];
    let gamma = [
        e(p[0].clone(), p[1].clone()),
        e(p[1].clone(), p[2].clone()),
        e(p[2].clone(), p[0].clone()),
    ];
    let mut transcript = Vec::new();
    let mut n = 0;
    // γ_k is a face: each edge carries the previous reversed edge to the next one
    for t in 0..3 {
        let prev = e(p[t].clone(), p[(t + 2) % 3].clone());
        n += 1;
        transcript.push(expect_step(
            &g,
            &table,
            n,
            &gamma[t],
            &prev,
            &gamma[(t + 1) % 3],
        )?);
    }
    let chain = [
        e(p[0].clone(), x(&one(k + 1 + d), k)),
        e(p[1].clone(), x(&one(k + d), k + 1)),
        e(p[2].clone(), x(&one(k + d), k + 2)),
        e(p[0].clone(), x(&one(k + 2 + d), k)),
    ];
    for t in 0..3 {
        n += 1;
        transcript.push(expect_step(
            &g,
            &table,
            n,
            &gamma[t],
            &chain[t],
            &chain[t + 1],
        )?);
    }
    let w = ObstructionWitness {
        kind: WitnessKind::Cycle,
        base_vertex: p[0].clone(),
        seed_edges: vec![gamma[0].clone(), e(p[0].clone(), p[2].clone())],
        path: vec![p[0].clone(), p[1].clone(), p[2].clone(), p[0].clone()],
        external_edge: Some(chain[0].clone()),
        external_image: Some(chain[3].clone()),
        moved: vec![(chain[0].clone(), chain[3].clone())],
        excluded_vertex: None,
        reaching_edge: None,
        transcript,
    };
    w.replay(&g)
        .map_err(|err| FamilyError::NoWitness(err.to_string()))?;
    Ok(w)
}

/// Replay of the cycle argument against BR_{i,j} for every k; returns the
/// witness for k = 0.
pub fn reproduce_thm12(i: usize, j: usize) -> Result<ObstructionWitness, FamilyError> {
    check_params(i, j)?;
    let first = reproduce_thm12_cycle(i, j, 0)?;
    for k in 1..=j - 2 {
        reproduce_thm12_cycle(i, j, k)?;
    }
    Ok(first)
}

/// The 3-face of R_{i,j} spanned at x_{0,1_j} by the edges towards
/// x_{0,0}, x_{1_{i-1},1_j}, x_{1_{i-j},1_j} must contain x_{0,1_{j-1}+1_j},
/// which the edge to it excludes.
pub fn reproduce_thm13(i: usize, j: usize) -> Result<ObstructionWitness, FamilyError> {
    check_params(i, j)?;
    let g = r_graph(i, j)?;
    let table = r_partial_connection(i, j)?;
    let d = i - j;
    let x =
        |u: &[usize], v: &[usize]| format!("{},{}", FlagIndex::ones(i, u), FlagIndex::ones(j, v));
    let e = |a: String, b: String| StarRef { at: a, toward: b };
    let base = x(&[], &[j]);
    let x00 = x(&[], &[]);
    let xa = x(&[i - 1], &[]);
    let xb = x(&[i - 1], &[j]);
    let xc = x(&[i - 1], &[j - 1, j]);
    let excluded = x(&[], &[j - 1, j]);
    let g1 = e(base.clone(), x00.clone());
    let g2 = e(x00.clone(), xa.clone());
    let g3 = e(xa.clone(), xb.clone());
    let f = e(xb.clone(), xc.clone());
    let seeds = vec![
        g1.clone(),
        e(base.clone(), xb.clone()),
        e(base.clone(), x(&[d], &[j])),
    ];
    let reaching = e(xc.clone(), excluded.clone());
    let steps = [
        (&g1, g1.clone(), e(x00.clone(), base.clone())),
        (&g1, seeds[1].clone(), g2.clone()),
        (&g1, seeds[2].clone(), e(x00.clone(), x(&[i], &[]))),
        (&g2, g2.clone(), e(xa.clone(), x00.clone())),
        (&g2, e(x00.clone(), base.clone()), g3.clone()),
        (
            &g2,
            e(x00.clone(), x(&[i], &[])),
            e(xa.clone(), x(&[i - 1, i], &[])),
        ),
        (&g3, e(xa.clone(), x00.clone()), e(xb.clone(), base.clone())),
        (&g3, e(xa.clone(), x(&[i - 1, i], &[])), f.clone()),
        (&f, e(xb.clone(), base.clone()), reaching.clone()),
    ];
    let mut transcript = Vec::new();
    for (n, (along, s, t)) in steps.iter().enumerate() {
        transcript.push(expect_step(&g, &table, n + 1, along, s, t)?);
    }
    let w = ObstructionWitness {
        kind: WitnessKind::FaceExclusion,
        base_vertex: base.clone(),
        seed_edges: seeds,
        path: vec![base, x00, xa, xb, xc],
        external_edge: None,
        external_image: None,
        moved: Vec::new(),
        excluded_vertex: Some(excluded),
        reaching_edge: Some(reaching),
        transcript,
    };
    w.replay(&g)
        .map_err(|err| FamilyError::NoWitness(err.to_string()))?;
    Ok(w)
}

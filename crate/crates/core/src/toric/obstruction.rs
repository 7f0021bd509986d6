use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use super::ToricError;
use crate::weightgraph::{
    forced_transport, is_definite_at, parallel_transport, Bijection, Connection, DirEdge, EdgePath,
    WeightHypergraph,
};

/// A star element named by its origin and one far vertex.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct StarRef {
    pub at: String,
    pub toward: String,
}

impl StarRef {
    pub fn of(g: &WeightHypergraph, d: DirEdge) -> Self {
        let far = g.hyperedges()[d.he]
            .vertices
            .iter()
            .copied()
            .filter(|&v| v != g.origin(d))
            .map(|v| g.label(v).to_string())
            .min()
            .expect("hyperedges have two or more vertices");
        StarRef {
            at: g.label(g.origin(d)).to_string(),
            toward: far,
        }
    }

    pub fn new(at: &str, toward: &str) -> Self {
        StarRef {
            at: at.to_string(),
            toward: toward.to_string(),
        }
    }

    pub fn resolve(&self, g: &WeightHypergraph) -> Result<DirEdge, ToricError> {
        Ok(g.dir_edge_by_label(&self.at, &self.toward)?)
    }
}

impl fmt::Display for StarRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E_{{{}}}^{{{}}}", self.at, self.toward)
    }
}

/// One application of a forced transport: ∇_along(source) = target.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TransportStep {
    pub along: StarRef,
    pub source: StarRef,
    pub target: StarRef,
}

impl fmt::Display for TransportStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "∇ along {}: {} ↦ {}",
            self.along, self.source, self.target
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessKind {
    Cycle,
    FaceExclusion,
}

/// Certificate that the torus action does not extend to a toric structure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ObstructionWitness {
    pub kind: WitnessKind,
    pub base_vertex: String,
    pub seed_edges: Vec<StarRef>,
    /// Vertex labels of the cycle (closed) or of the face path.
    pub path: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub external_edge: Option<StarRef>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub external_image: Option<StarRef>,
    /// Every external element moved by the monodromy, with its image.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub moved: Vec<(StarRef, StarRef)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub excluded_vertex: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reaching_edge: Option<StarRef>,
    pub transcript: Vec<TransportStep>,
}

impl ObstructionWitness {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        match self.kind {
            WitnessKind::Cycle => {
                s += &format!("cycle obstruction at {}\n", self.base_vertex);
                s += &format!("cycle: {}\n", self.path.join(" → "));
            }
            WitnessKind::FaceExclusion => {
                s += &format!("face-exclusion obstruction at {}\n", self.base_vertex);
                s += &format!("seeds: {}\n", self.seed_edges.iter().join(", "));
                if !self.path.is_empty() {
                    s += &format!("path: {}\n", self.path.join(" → "));
                }
            }
        }
        s += "transcript:\n";
        for (k, t) in self.transcript.iter().enumerate() {
            s += &format!("  {:>2}. {t}\n", k + 1);
        }
        if let (Some(e), Some(im)) = (&self.external_edge, &self.external_image) {
            s += &format!("monodromy moves external edge: {e} ↦ {im}\n");
        }
        for (e, im) in self.moved.iter().skip(1) {
            s += &format!("  also {e} ↦ {im}\n");
        }
        if let (Some(x), Some(e)) = (&self.excluded_vertex, &self.reaching_edge) {
            s += &format!("face contains {e}, whose end {x} is excluded\n");
        }
        s
    }

    /// Recompute every transport of the transcript from scratch and check
    /// the contradiction it certifies.
    pub fn replay(&self, g: &WeightHypergraph) -> Result<(), ToricError> {
        let fail = |step: usize, reason: String| ToricError::ReplayFailed { step, reason };
        let mut c = Connection::new();
        for (k, t) in self.transcript.iter().enumerate() {
            let e = t.along.resolve(g)?;
            if !is_safe(g, e) {
                return Err(fail(k + 1, format!("{} is not safe", t.along)));
            }
            let m = forced_transport(g, e)?;
            let (x, y) = (t.source.resolve(g)?, t.target.resolve(g)?);
            if m.get(&x) != Some(&y) {
                return Err(fail(
                    k + 1,
                    format!("forced transport sends {} elsewhere", t.source),
                ));
            }
            c.insert(e, m);
        }
        match self.kind {
            WitnessKind::Cycle => {
                let labels: Vec<&str> = self.path.iter().map(String::as_str).collect();
                let path = EdgePath::through(g, &labels)?;
                if !path.is_cycle(g) {
                    return Err(fail(0, "path is not closed".into()));
                }
                for &e in &path.0 {
                    if !c.covers(e) {
                        c.insert(e, forced_transport(g, e)?);
                    }
                }
                let n = path.len();
                for t in 0..n {
                    let prev = g.reverse(path.0[(t + n - 1) % n]);
                    if c.apply(path.0[t], prev) != Some(path.0[(t + 1) % n]) {
                        return Err(fail(t + 1, "cycle is not invariant".into()));
                    }
                }
                let (Some(x), Some(y)) = (&self.external_edge, &self.external_image) else {
                    return Err(fail(0, "missing external edge".into()));
                };
                let got = parallel_transport(g, &c, &path, x.resolve(g)?)?;
                if got != y.resolve(g)? || got == x.resolve(g)? {
                    return Err(fail(n, "monodromy does not move the external edge".into()));
                }
                Ok(())
            }
            WitnessKind::FaceExclusion => {
                let (Some(x), Some(e)) = (&self.excluded_vertex, &self.reaching_edge) else {
                    return Err(fail(0, "missing excluded vertex".into()));
                };
                let base = g.vertex(&self.base_vertex)?;
                let seeds: BTreeSet<DirEdge> = self
                    .seed_edges
                    .iter()
                    .map(|s| s.resolve(g))
                    .collect::<Result<_, _>>()?;
                let excluded = g
                    .star(base)
                    .iter()
                    .filter(|d| !seeds.contains(d))
                    .any(|&d| g.label(g.end(d)) == x);
                if !excluded {
                    return Err(fail(0, format!("{x} is not excluded by the seeds")));
                }
                // the reaching edge must be derived from the seeds
                let mut known: BTreeSet<DirEdge> = seeds;
                for (k, t) in self.transcript.iter().enumerate() {
                    let (a, s) = (t.along.resolve(g)?, t.source.resolve(g)?);
                    if !known.contains(&a) || !known.contains(&s) {
                        return Err(fail(k + 1, "step uses an edge outside the face".into()));
                    }
                    known.insert(t.target.resolve(g)?);
                }
                let re = e.resolve(g)?;
                if !known.contains(&re) || g.label(g.end(re)) != x {
                    return Err(fail(
                        self.transcript.len(),
                        "reaching edge not derived".into(),
                    ));
                }
                Ok(())
            }
        }
    }
}

/// Outcome of a search; `inconclusive` counts seeds whose closure hit
/// the growth bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchResult {
    pub witness: Option<ObstructionWitness>,
    pub inconclusive: usize,
}

/// Definite, with pairwise independent weights at both endpoints.
pub fn is_safe(g: &WeightHypergraph, e: DirEdge) -> bool {
    g.is_edge(e)
        && g.two_independent_at(g.origin(e))
        && g.two_independent_at(g.end(e))
        && is_definite_at(g, e).unwrap_or(false)
}

/// Forced transports on every safe edge.
pub fn safe_transports(g: &WeightHypergraph) -> BTreeMap<DirEdge, Bijection> {
    g.edges()
        .into_par_iter()
        .filter(|&e| is_safe(g, e))
        .filter_map(|e| forced_transport(g, e).ok().map(|m| (e, m)))
        .collect()
}

fn step(g: &WeightHypergraph, along: DirEdge, source: DirEdge, target: DirEdge) -> TransportStep {
    TransportStep {
        along: StarRef::of(g, along),
        source: StarRef::of(g, source),
        target: StarRef::of(g, target),
    }
}

/// Search for an invariant cycle through safe edges whose monodromy moves
/// an external edge at its base.
pub fn cycle_obstruction(g: &WeightHypergraph, max_len: usize) -> SearchResult {
    let t = safe_transports(g);
    let order = g.vertices_by_label();
    let mut rank = vec![0; g.num_vertices()];
    for (k, &v) in order.iter().enumerate() {
        rank[v] = k;
    }
    let witness = order.par_iter().find_map_first(|&base| {
        let mut path = Vec::new();
        let mut on = BTreeSet::from([base]);
        cycle_dfs(g, &t, &rank, base, base, max_len, &mut path, &mut on)
    });
    SearchResult {
        witness,
        inconclusive: 0,
    }
}

#[allow(clippy::too_many_arguments)]
fn cycle_dfs(
    g: &WeightHypergraph,
    t: &BTreeMap<DirEdge, Bijection>,
    rank: &[usize],
    base: usize,
    at: usize,
    max_len: usize,
    path: &mut Vec<DirEdge>,
    on: &mut BTreeSet<usize>,
) -> Option<ObstructionWitness> {
    if path.len() >= max_len {
        return None;
    }
    for &e in g.star(at) {
        if !t.contains_key(&e) {
            continue;
        }
        let end = g.end(e);
        path.push(e);
        let found = if end == base {
            if path.len() >= 3 {
                cycle_witness(g, t, path)
            } else {
                None
            }
        } else if rank[end] > rank[base] && !on.contains(&end) {
            on.insert(end);
            let r = cycle_dfs(g, t, rank, base, end, max_len, path, on);
            on.remove(&end);
            r
        } else {
            None
        };
        path.pop();
        if found.is_some() {
            return found;
        }
    }
    None
}

fn cycle_witness(
    g: &WeightHypergraph,
    t: &BTreeMap<DirEdge, Bijection>,
    path: &[DirEdge],
) -> Option<ObstructionWitness> {
    let n = path.len();
    let mut transcript = Vec::new();
    for k in 0..n {
        let prev = g.reverse(path[(k + n - 1) % n]);
        let img = t[&path[k]][&prev];
        if img != path[(k + 1) % n] {
            return None;
        }
        transcript.push(step(g, path[k], prev, img));
    }
    let base = g.origin(path[0]);
    let inside = [path[0], g.reverse(path[n - 1])];
    let mut moved = Vec::new();
    let mut first_track = None;
    for &x in g.star(base) {
        if inside.contains(&x) {
            continue;
        }
        let mut cur = x;
        let mut track = Vec::new();
        for &e in path {
            let next = t[&e][&cur];
            track.push(step(g, e, cur, next));
            cur = next;
        }
        if cur != x {
            moved.push((StarRef::of(g, x), StarRef::of(g, cur)));
            first_track.get_or_insert(track);
        }
    }
    let track = first_track?;
    transcript.extend(track);
    let mut labels: Vec<String> = path
        .iter()
        .map(|&e| g.label(g.origin(e)).to_string())
        .collect();
    labels.push(g.label(base).to_string());
    Some(ObstructionWitness {
        kind: WitnessKind::Cycle,
        base_vertex: g.label(base).to_string(),
        seed_edges: vec![
            StarRef::of(g, path[0]),
            StarRef::of(g, g.reverse(path[n - 1])),
        ],
        path: labels,
        external_edge: Some(moved[0].0.clone()),
        external_image: Some(moved[0].1.clone()),
        moved,
        excluded_vertex: None,
        reaching_edge: None,
        transcript,
    })
}

/// Discovery index of each reached star element and the transport (edge,
/// preimage) that produced it.
type Provenance = BTreeMap<DirEdge, (usize, Option<(DirEdge, DirEdge)>)>;

enum Growth {
    Witness(Box<ObstructionWitness>),
    Closed,
    Budget,
}

/// Grow the face spanned by `seeds` at `v` through forced transports and
/// report a witness if it must contain a vertex joined to `v` by an edge
/// outside the seeds.
pub fn face_exclusion_at(
    g: &WeightHypergraph,
    v: usize,
    seeds: &[DirEdge],
    max_growth: usize,
) -> Result<Option<ObstructionWitness>, ToricError> {
    let t = safe_transports(g);
    match grow(g, &t, v, seeds, max_growth) {
        Growth::Witness(w) => Ok(Some(*w)),
        Growth::Closed => Ok(None),
        Growth::Budget => Err(ToricError::ClosureNotValent(seeds.len())),
    }
}

fn grow(
    g: &WeightHypergraph,
    t: &BTreeMap<DirEdge, Bijection>,
    v: usize,
    seeds: &[DirEdge],
    max_growth: usize,
) -> Growth {
    let seed_set: BTreeSet<DirEdge> = seeds.iter().copied().collect();
    if !g.two_independent_at(v)
        || seed_set.len() != seeds.len()
        || seeds.iter().any(|&d| g.origin(d) != v)
    {
        return Growth::Closed;
    }
    let excluded: BTreeSet<usize> = g
        .star(v)
        .iter()
        .filter(|d| !seed_set.contains(d))
        .map(|&d| g.end(d))
        .collect();
    let mut sets: BTreeMap<usize, Vec<DirEdge>> = BTreeMap::from([(v, seeds.to_vec())]);
    let mut origin: Provenance = BTreeMap::new();
    for &d in seeds {
        let n = origin.len();
        origin.insert(d, (n, None));
    }
    let mut queue = VecDeque::from([v]);
    let mut used = 0;
    while let Some(w) = queue.pop_front() {
        let s = sets[&w].clone();
        for &e in &s {
            let end = g.end(e);
            if sets.contains_key(&end) {
                continue;
            }
            let Some(m) = t.get(&e) else { continue };
            used += 1;
            if used > max_growth {
                return Growth::Budget;
            }
            let image: Vec<DirEdge> = s.iter().map(|x| m[x]).collect();
            for (&x, &y) in s.iter().zip(&image) {
                if !origin.contains_key(&y) {
                    let n = origin.len();
                    origin.insert(y, (n, Some((e, x))));
                }
            }
            if let Some(&hit) = image.iter().find(|&&y| excluded.contains(&g.end(y))) {
                return Growth::Witness(Box::new(exclusion_witness(g, v, seeds, &origin, hit)));
            }
            sets.insert(end, image);
            queue.push_back(end);
        }
    }
    Growth::Closed
}

fn exclusion_witness(
    g: &WeightHypergraph,
    v: usize,
    seeds: &[DirEdge],
    origin: &Provenance,
    hit: DirEdge,
) -> ObstructionWitness {
    let mut need = BTreeSet::new();
    let mut stack = vec![hit];
    while let Some(d) = stack.pop() {
        if let (_, Some((e, x))) = origin[&d] {
            if need.insert((origin[&d].0, d)) {
                stack.push(e);
                stack.push(x);
            }
        }
    }
    let transcript = need
        .into_iter()
        .map(|(_, d)| {
            let (e, x) = origin[&d].1.expect("derived element");
            step(g, e, x, d)
        })
        .collect();
    ObstructionWitness {
        kind: WitnessKind::FaceExclusion,
        base_vertex: g.label(v).to_string(),
        seed_edges: seeds.iter().map(|&d| StarRef::of(g, d)).collect(),
        path: Vec::new(),
        external_edge: None,
        external_image: None,
        moved: Vec::new(),
        excluded_vertex: Some(g.label(g.end(hit)).to_string()),
        reaching_edge: Some(StarRef::of(g, hit)),
        transcript,
    }
}

/// Try every vertex with independent weights and every r-subset of its
/// edges, in label order.
pub fn face_exclusion_obstruction(
    g: &WeightHypergraph,
    r: usize,
    max_growth: usize,
) -> SearchResult {
    let t = safe_transports(g);
    let per_vertex: Vec<(Option<ObstructionWitness>, usize)> = g
        .vertices_by_label()
        .into_par_iter()
        .map(|v| {
            let star = g.star(v);
            if r == 0 || r >= star.len() || !g.two_independent_at(v) {
                return (None, 0);
            }
            let mut budget = 0;
            for seeds in star.iter().copied().combinations(r) {
                match grow(g, &t, v, &seeds, max_growth) {
                    Growth::Witness(w) => return (Some(*w), budget),
                    Growth::Budget => budget += 1,
                    Growth::Closed => {}
                }
            }
            (None, budget)
        })
        .collect();
    let inconclusive = per_vertex.iter().map(|(_, b)| b).sum();
    let witness = per_vertex.into_iter().find_map(|(w, _)| w);
    SearchResult {
        witness,
        inconclusive,
    }
}

/// Cycle search, then face exclusion by increasing face dimension (or only
/// `face_dim`). Inconclusive counts accumulate over the dimensions tried.
pub fn search_obstruction(
    g: &WeightHypergraph,
    max_len: usize,
    max_growth: usize,
    face_dim: Option<usize>,
) -> SearchResult {
    let c = cycle_obstruction(g, max_len);
    if c.witness.is_some() {
        return c;
    }
    let dims: Vec<usize> = match face_dim {
        Some(r) => vec![r],
        None => (2..g.valence()).collect(),
    };
    let mut inconclusive = 0;
    for r in dims {
        let res = face_exclusion_obstruction(g, r, max_growth);
        inconclusive += res.inconclusive;
        if res.witness.is_some() {
            return SearchResult {
                witness: res.witness,
                inconclusive,
            };
        }
    }
    SearchResult {
        witness: None,
        inconclusive,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{br_graph, r_graph};
    use crate::toric::{gkm_from_charpair, Preset};

    #[test]
    fn br32_cycle_witness() {
        let g = br_graph(3, 2).unwrap();
        let res = cycle_obstruction(&g, 6);
        let w = res.witness.expect("witness");
        assert_eq!(w.path, vec!["000,0", "000,1", "000,2", "000,0"]);
        assert!(w.moved.contains(&(
            StarRef::new("000,0", "010,0"),
            StarRef::new("000,0", "001,0")
        )));
        w.replay(&g).unwrap();
    }

    #[test]
    fn r32_face_exclusion() {
        let g = r_graph(3, 2).unwrap();
        let v = g.vertex("000,01").unwrap();
        let seeds: Vec<DirEdge> = ["000,00", "010,01", "100,01"]
            .iter()
            .map(|x| g.dir_edge_by_label("000,01", x).unwrap())
            .collect();
        let w = face_exclusion_at(&g, v, &seeds, 64)
            .unwrap()
            .expect("witness");
        assert_eq!(w.excluded_vertex.as_deref(), Some("000,11"));
        w.replay(&g).unwrap();
    }

    #[test]
    fn toric_graphs_have_none() {
        for p in Preset::ALL {
            let (g, _) = gkm_from_charpair(&p.charpair()).unwrap();
            assert!(cycle_obstruction(&g, 6).witness.is_none(), "{}", p.name());
            for r in 1..g.valence() {
                assert!(
                    face_exclusion_obstruction(&g, r, 64).witness.is_none(),
                    "{} r={r}",
                    p.name()
                );
            }
        }
    }
}

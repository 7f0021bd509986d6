//! Weight hypergraphs of torus actions with isolated fixed points.
//!
//! A hyperedge of dimension `d` stands for a `d`-dimensional invariant
//! subvariety joining its vertices; dimension one hyperedges are the genuine
//! edges. Every hyperedge stores one axial value per vertex, namely the
//! weight of the hyperedge directed out of that vertex.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Weight(pub Vec<i64>);

impl Weight {
    pub fn zero(k: usize) -> Self {
        Weight(vec![0; k])
    }

    /// `e_q` in a lattice of rank `k`, with the convention `e_0 = 0`.
    pub fn e(k: usize, q: usize) -> Self {
        let mut w = vec![0; k];
        if q > 0 {
            w[q - 1] = 1;
        }
        Weight(w)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn neg(&self) -> Self {
        Weight(self.0.iter().map(|x| -x).collect())
    }

    pub fn add(&self, o: &Weight) -> Self {
        Weight(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &Weight) -> Self {
        Weight(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, c: i64) -> Self {
        Weight(self.0.iter().map(|x| c * x).collect())
    }

    pub fn is_sign_canonical(&self) -> bool {
        self.0.iter().find(|&&x| x != 0).is_none_or(|&x| x > 0)
    }

    /// Representative of `±self` whose first nonzero coordinate is positive.
    pub fn canonical(&self) -> Self {
        if self.is_sign_canonical() {
            self.clone()
        } else {
            self.neg()
        }
    }

    pub fn content(&self) -> i64 {
        self.0
            .iter()
            .fold(0i64, |g, &x| num_integer::Integer::gcd(&g, &x))
    }

    pub fn primitive(&self) -> Self {
        let g = self.content();
        if g == 0 {
            self.clone()
        } else {
            Weight(self.0.iter().map(|x| x / g).collect())
        }
    }

    /// Linear dependence of two vectors, via vanishing 2×2 minors.
    pub fn parallel(&self, o: &Weight) -> bool {
        let n = self.len();
        for a in 0..n {
            for b in a + 1..n {
                let m = self.0[a] as i128 * o.0[b] as i128 - self.0[b] as i128 * o.0[a] as i128;
                if m != 0 {
                    return false;
                }
            }
        }
        true
    }

    /// `Some(c)` iff `self = c·d` with `c ∈ ℤ`.
    pub fn multiple_of(&self, d: &Weight) -> Option<i64> {
        let p = d.0.iter().position(|&x| x != 0)?;
        if self.0[p] % d.0[p] != 0 {
            return None;
        }
        let c = self.0[p] / d.0[p];
        (d.scale(c) == *self).then_some(c)
    }

    /// Multiplication by a k×r integer matrix from the right.
    pub fn apply(&self, m: &[Vec<i64>]) -> Weight {
        let r = m.first().map_or(0, Vec::len);
        Weight(
            (0..r)
                .map(|j| self.0.iter().zip(m).map(|(x, row)| x * row[j]).sum())
                .collect(),
        )
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hyperedge {
    pub vertices: Vec<usize>,
    pub dim: usize,
    /// Axial value of the hyperedge directed out of `vertices[p]`.
    pub alpha: Vec<Weight>,
}

impl Hyperedge {
    /// Edge from `a` to `b` with `α(a→b) = w`.
    pub fn edge(a: usize, b: usize, w: Weight) -> Self {
        let r = w.neg();
        Hyperedge {
            vertices: vec![a, b],
            dim: 1,
            alpha: vec![w, r],
        }
    }

    pub fn hyper(vertices: Vec<usize>, dim: usize, w: &Weight) -> Self {
        let c = w.canonical();
        let alpha = vec![c; vertices.len()];
        Hyperedge {
            vertices,
            dim,
            alpha,
        }
    }

    /// The stored label: signed for edges, sign-canonical otherwise.
    pub fn weight(&self) -> Weight {
        if self.dim == 1 {
            self.alpha[0].clone()
        } else {
            self.alpha[0].canonical()
        }
    }
}

/// A hyperedge directed out of one of its vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DirEdge {
    pub he: usize,
    pub pos: usize,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("duplicate vertex label `{0}`")]
    DuplicateVertex(String),
    #[error("`{0}` is not an edge")]
    NotAnEdge(String),
    #[error("edge {0} is not definite")]
    NotDefinite(String),
    #[error("no admissible matching for {element} along {edge}")]
    NoAdmissibleMatching { edge: String, element: String },
    #[error("no connection value on edge {0}")]
    PathNotCovered(String),
    #[error("path is not composable at step {0}")]
    NotComposable(usize),
    #[error("weight {weight} at vertex {vertex} maps to zero")]
    NonIsolatedFixedPoints { vertex: String, weight: String },
    #[error("cocharacter map is not surjective")]
    NotSurjective,
    #[error("weight length {found} does not match rank {expected}")]
    RankMismatch { expected: usize, found: usize },
    #[error("merged hyperedge has inconsistent dimension at {0}")]
    InconsistentMerge(String),
    #[error("invalid graph data: {0}")]
    Malformed(String),
}

#[derive(Clone, Debug)]
pub struct WeightHypergraph {
    rank: usize,
    valence: usize,
    labels: Vec<String>,
    index: HashMap<String, usize>,
    hyperedges: Vec<Hyperedge>,
    star: Vec<Vec<DirEdge>>,
}

impl WeightHypergraph {
    pub fn new(
        rank: usize,
        valence: usize,
        labels: Vec<String>,
        hyperedges: Vec<Hyperedge>,
    ) -> Result<Self, GraphError> {
        let mut index = HashMap::new();
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(GraphError::DuplicateVertex(l.clone()));
            }
        }
        for h in &hyperedges {
            if h.vertices.len() != h.alpha.len() || h.vertices.is_empty() {
                return Err(GraphError::Malformed(
                    "axial values do not match vertices".into(),
                ));
            }
            if let Some(&v) = h.vertices.iter().find(|&&v| v >= labels.len()) {
                return Err(GraphError::UnknownVertex(v.to_string()));
            }
            if let Some(w) = h.alpha.iter().find(|w| w.len() != rank) {
                return Err(GraphError::RankMismatch {
                    expected: rank,
                    found: w.len(),
                });
            }
        }
        let mut star = vec![Vec::new(); labels.len()];
        for (he, h) in hyperedges.iter().enumerate() {
            for (pos, &v) in h.vertices.iter().enumerate() {
                star[v].push(DirEdge { he, pos });
            }
        }
        let mut g = WeightHypergraph {
            rank,
            valence,
            labels,
            index,
            hyperedges,
            star,
        };
        let mut star = std::mem::take(&mut g.star);
        for s in star.iter_mut() {
            s.sort_by_key(|&d| (g.far_labels(d), d));
        }
        g.star = star;
        Ok(g)
    }

    fn far_labels(&self, d: DirEdge) -> Vec<String> {
        let h = &self.hyperedges[d.he];
        let mut ls: Vec<String> = h
            .vertices
            .iter()
            .enumerate()
            .filter(|&(p, _)| p != d.pos)
            .map(|(_, &v)| self.labels[v].clone())
            .collect();
        ls.sort();
        ls
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn valence(&self) -> usize {
        self.valence
    }

    pub fn num_vertices(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn vertex(&self, label: &str) -> Result<usize, GraphError> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| GraphError::UnknownVertex(label.to_string()))
    }

    pub fn hyperedges(&self) -> &[Hyperedge] {
        &self.hyperedges
    }

    /// Vertex indices ordered by label.
    pub fn vertices_by_label(&self) -> Vec<usize> {
        let mut vs: Vec<usize> = (0..self.labels.len()).collect();
        vs.sort_by(|&a, &b| self.labels[a].cmp(&self.labels[b]));
        vs
    }

    pub fn star(&self, v: usize) -> &[DirEdge] {
        &self.star[v]
    }

    pub fn origin(&self, d: DirEdge) -> usize {
        self.hyperedges[d.he].vertices[d.pos]
    }

    pub fn dim(&self, d: DirEdge) -> usize {
        self.hyperedges[d.he].dim
    }

    pub fn is_edge(&self, d: DirEdge) -> bool {
        let h = &self.hyperedges[d.he];
        h.dim == 1 && h.vertices.len() == 2
    }

    /// End vertex of an edge. For hyperedges this is the first other vertex.
    pub fn end(&self, d: DirEdge) -> usize {
        let h = &self.hyperedges[d.he];
        h.vertices[if d.pos == 0 {
            1.min(h.vertices.len() - 1)
        } else {
            0
        }]
    }

    pub fn reverse(&self, d: DirEdge) -> DirEdge {
        DirEdge {
            he: d.he,
            pos: 1 - d.pos,
        }
    }

    pub fn alpha(&self, d: DirEdge) -> &Weight {
        &self.hyperedges[d.he].alpha[d.pos]
    }

    /// Overwrite one directed axial value. Used to build counterexamples.
    pub fn set_alpha(&mut self, d: DirEdge, w: Weight) {
        self.hyperedges[d.he].alpha[d.pos] = w;
    }

    pub fn contains(&self, d: DirEdge, v: usize) -> bool {
        self.hyperedges[d.he].vertices.contains(&v)
    }

    /// The star element at `from` whose hyperedge passes through `to`.
    pub fn dir_edge(&self, from: usize, to: usize) -> Option<DirEdge> {
        self.star[from]
            .iter()
            .copied()
            .find(|&d| self.contains(d, to))
    }

    pub fn dir_edge_by_label(&self, from: &str, to: &str) -> Result<DirEdge, GraphError> {
        let (a, b) = (self.vertex(from)?, self.vertex(to)?);
        self.dir_edge(a, b)
            .ok_or_else(|| GraphError::NotAnEdge(format!("E_{{{from}}}^{{{to}}}")))
    }

    /// All directed genuine edges, ordered by (origin label, end label).
    pub fn edges(&self) -> Vec<DirEdge> {
        let mut out = Vec::new();
        for v in self.vertices_by_label() {
            for &d in &self.star[v] {
                if self.is_edge(d) {
                    out.push(d);
                }
            }
        }
        out
    }

    pub fn describe(&self, d: DirEdge) -> String {
        let o = &self.labels[self.origin(d)];
        if self.is_edge(d) {
            format!("E_{{{}}}^{{{}}}", o, self.labels[self.end(d)])
        } else {
            format!("E_{{{}}}^{{{}}}", o, self.far_labels(d).join("|"))
        }
    }

    /// Pairwise linear independence of all weights at `v`, with every star
    /// element a genuine edge.
    pub fn two_independent_at(&self, v: usize) -> bool {
        let s = &self.star[v];
        s.iter().all(|&d| self.is_edge(d))
            && s.iter().enumerate().all(|(a, &da)| {
                s[a + 1..]
                    .iter()
                    .all(|&db| !self.alpha(da).parallel(self.alpha(db)))
            })
    }

    pub fn is_graph(&self) -> bool {
        self.hyperedges
            .iter()
            .all(|h| h.dim == 1 && h.vertices.len() == 2)
    }

    /// Tangent weight multiset at `v` as recorded by the star: an edge
    /// contributes its signed weight, a hyperedge `dim` copies of its label.
    pub fn star_weights(&self, v: usize) -> Vec<Weight> {
        let mut out = Vec::new();
        for &d in &self.star[v] {
            for _ in 0..self.dim(d) {
                out.push(self.alpha(d).clone());
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// validation

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Hyperloop {
        hyperedge: String,
    },
    EdgeArity {
        hyperedge: String,
    },
    ZeroWeight {
        hyperedge: String,
    },
    NotClutter {
        larger: String,
        smaller: String,
    },
    MultipleHyperedge {
        first: String,
        second: String,
    },
    Valence {
        vertex: String,
        found: usize,
        expected: usize,
    },
    AxialSign {
        edge: String,
    },
    AxialUpToSign {
        hyperedge: String,
    },
    AxialRank {
        vertex: String,
        rank: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Hyperloop { hyperedge } => {
                write!(f, "hyperloop: {hyperedge} repeats a vertex")
            }
            Violation::EdgeArity { hyperedge } => {
                write!(f, "arity: {hyperedge} has dimension 1 but not two vertices")
            }
            Violation::ZeroWeight { hyperedge } => write!(f, "zero weight on {hyperedge}"),
            Violation::NotClutter { larger, smaller } => {
                write!(f, "clutter: {smaller} is contained in {larger}")
            }
            Violation::MultipleHyperedge { first, second } => {
                write!(
                    f,
                    "multiple hyperedges: {first} and {second} share two vertices"
                )
            }
            Violation::Valence {
                vertex,
                found,
                expected,
            } => {
                write!(
                    f,
                    "valence: vertex {vertex} has {found}, expected {expected}"
                )
            }
            Violation::AxialSign { edge } => {
                write!(f, "axial (1): reversed weight of {edge} is not negated")
            }
            Violation::AxialUpToSign { hyperedge } => {
                write!(f, "axial (2): weights of {hyperedge} disagree beyond sign")
            }
            Violation::AxialRank { vertex, rank } => {
                write!(f, "axial (3): weights at {vertex} span rank {rank}")
            }
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return writeln!(f, "valid");
        }
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

fn he_name(g: &WeightHypergraph, he: usize) -> String {
    let h = &g.hyperedges[he];
    let ls: Vec<&str> = h.vertices.iter().map(|&v| g.labels[v].as_str()).collect();
    format!("{{{}}}", ls.join(","))
}

pub fn validate_axial(g: &WeightHypergraph) -> ValidationReport {
    let mut out = Vec::new();
    let hs = &g.hyperedges;
    let sets: Vec<BTreeSet<usize>> = hs
        .iter()
        .map(|h| h.vertices.iter().copied().collect())
        .collect();
    for (i, h) in hs.iter().enumerate() {
        if sets[i].len() != h.vertices.len() {
            out.push(Violation::Hyperloop {
                hyperedge: he_name(g, i),
            });
        }
        if h.dim == 1 && h.vertices.len() != 2 {
            out.push(Violation::EdgeArity {
                hyperedge: he_name(g, i),
            });
        }
        if h.alpha.iter().any(Weight::is_zero) {
            out.push(Violation::ZeroWeight {
                hyperedge: he_name(g, i),
            });
        }
        if h.dim == 1 && h.vertices.len() == 2 {
            if h.alpha[1] != h.alpha[0].neg() {
                out.push(Violation::AxialSign {
                    edge: he_name(g, i),
                });
            }
        } else if h
            .alpha
            .iter()
            .any(|w| w.canonical() != h.alpha[0].canonical())
        {
            out.push(Violation::AxialUpToSign {
                hyperedge: he_name(g, i),
            });
        }
    }
    // clutter and multiplicity only concern hyperedges meeting at a vertex
    let mut pairs = BTreeSet::new();
    for s in &g.star {
        for (a, da) in s.iter().enumerate() {
            for db in &s[a + 1..] {
                if da.he != db.he {
                    pairs.insert((da.he.min(db.he), da.he.max(db.he)));
                }
            }
        }
    }
    for (i, j) in pairs {
        let common = sets[i].intersection(&sets[j]).count();
        if sets[i].is_subset(&sets[j]) || sets[j].is_subset(&sets[i]) {
            let (big, small) = if sets[i].len() >= sets[j].len() {
                (i, j)
            } else {
                (j, i)
            };
            out.push(Violation::NotClutter {
                larger: he_name(g, big),
                smaller: he_name(g, small),
            });
        } else if common >= 2 {
            out.push(Violation::MultipleHyperedge {
                first: he_name(g, i),
                second: he_name(g, j),
            });
        }
    }
    for v in g.vertices_by_label() {
        let found: usize = g.star[v].iter().map(|&d| g.dim(d)).sum();
        if found != g.valence {
            out.push(Violation::Valence {
                vertex: g.labels[v].clone(),
                found,
                expected: g.valence,
            });
        }
        let rows: Vec<Vec<i64>> = g.star[v].iter().map(|&d| g.alpha(d).0.clone()).collect();
        let r = linalg::rank_i64(&rows);
        if r != g.rank {
            out.push(Violation::AxialRank {
                vertex: g.labels[v].clone(),
                rank: r,
            });
        }
    }
    ValidationReport { violations: out }
}

// ---------------------------------------------------------------------------
// connections

/// Whether `a + ℝd` and `b + ℝd` are the same affine line.
pub fn same_line(a: &Weight, b: &Weight, d: &Weight) -> bool {
    a.sub(b).parallel(d)
}

pub fn is_definite_at(g: &WeightHypergraph, e: DirEdge) -> Result<bool, GraphError> {
    if !g.is_edge(e) {
        return Err(GraphError::NotAnEdge(g.describe(e)));
    }
    let d = g.alpha(e);
    if d.is_zero() {
        return Ok(false);
    }
    let others: Vec<&Weight> = g
        .star(g.origin(e))
        .iter()
        .filter(|&&x| x != e)
        .map(|&x| g.alpha(x))
        .collect();
    for (i, a) in others.iter().enumerate() {
        for b in &others[i + 1..] {
            if same_line(a, b, d) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Integer `c` with `α(target) − α(source) = c·α(e)`. Hyperedge labels are
/// only defined up to sign, so both signs of the target label are tried.
pub fn multiplier(
    g: &WeightHypergraph,
    e: DirEdge,
    source: DirEdge,
    target: DirEdge,
) -> Option<i64> {
    let d = g.alpha(e);
    let a = g.alpha(source);
    let b = g.alpha(target);
    if g.dim(source) != g.dim(target) {
        return None;
    }
    if let Some(c) = b.sub(a).multiple_of(d) {
        return Some(c);
    }
    if !g.is_edge(target) {
        return b.neg().sub(a).multiple_of(d);
    }
    None
}

pub type Bijection = BTreeMap<DirEdge, DirEdge>;

/// The unique star bijection along a definite edge compatible with the
/// congruence condition.
pub fn forced_transport(g: &WeightHypergraph, e: DirEdge) -> Result<Bijection, GraphError> {
    if !is_definite_at(g, e)? {
        return Err(GraphError::NotDefinite(g.describe(e)));
    }
    let er = g.reverse(e);
    let w = g.origin(er);
    let mut map = BTreeMap::new();
    let mut used = BTreeSet::new();
    map.insert(e, er);
    used.insert(er);
    for &x in g.star(g.origin(e)) {
        if x == e {
            continue;
        }
        let cands: Vec<DirEdge> = g
            .star(w)
            .iter()
            .copied()
            .filter(|&y| y != er && multiplier(g, e, x, y).is_some())
            .collect();
        match cands.as_slice() {
            [y] if used.insert(*y) => {
                map.insert(x, *y);
            }
            _ => {
                return Err(GraphError::NoAdmissibleMatching {
                    edge: g.describe(e),
                    element: g.describe(x),
                })
            }
        }
    }
    if map.len() != g.star(w).len() {
        return Err(GraphError::NoAdmissibleMatching {
            edge: g.describe(e),
            element: "star sizes differ".into(),
        });
    }
    Ok(map)
}

/// Every star bijection along `e` fixing `e ↦ ē`, preserving dimension and
/// satisfying the congruence condition. Exponential; meant as an oracle.
pub fn admissible_bijections(g: &WeightHypergraph, e: DirEdge) -> Vec<Bijection> {
    let er = g.reverse(e);
    let src: Vec<DirEdge> = g
        .star(g.origin(e))
        .iter()
        .copied()
        .filter(|&x| x != e)
        .collect();
    let dst: Vec<DirEdge> = g
        .star(g.origin(er))
        .iter()
        .copied()
        .filter(|&x| x != er)
        .collect();
    let mut out = Vec::new();
    if src.len() != dst.len() {
        return out;
    }
    let mut taken = vec![false; dst.len()];
    let mut cur = Vec::new();
    fn rec(
        g: &WeightHypergraph,
        e: DirEdge,
        src: &[DirEdge],
        dst: &[DirEdge],
        taken: &mut [bool],
        cur: &mut Vec<(DirEdge, DirEdge)>,
        out: &mut Vec<Bijection>,
    ) {
        let k = cur.len();
        if k == src.len() {
            let mut m: Bijection = cur.iter().copied().collect();
            m.insert(e, g.reverse(e));
            out.push(m);
            return;
        }
        for j in 0..dst.len() {
            if !taken[j] && multiplier(g, e, src[k], dst[j]).is_some() {
                taken[j] = true;
                cur.push((src[k], dst[j]));
                rec(g, e, src, dst, taken, cur, out);
                cur.pop();
                taken[j] = false;
            }
        }
    }
    rec(g, e, &src, &dst, &mut taken, &mut cur, &mut out);
    out
}

/// A partial connection: star bijections on some genuine edges.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Connection {
    pub maps: BTreeMap<DirEdge, Bijection>,
}

impl Connection {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, e: DirEdge, m: Bijection) {
        self.maps.insert(e, m);
    }

    pub fn get(&self, e: DirEdge) -> Option<&Bijection> {
        self.maps.get(&e)
    }

    pub fn apply(&self, e: DirEdge, x: DirEdge) -> Option<DirEdge> {
        self.maps.get(&e)?.get(&x).copied()
    }

    pub fn covers(&self, e: DirEdge) -> bool {
        self.maps.contains_key(&e)
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConnectionViolation {
    NotAnEdge { edge: String },
    NotBijective { edge: String },
    Inverse { edge: String },
    EdgeToReverse { edge: String },
    Congruence { edge: String, element: String },
}

impl fmt::Display for ConnectionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConnectionViolation::NotAnEdge { edge } => write!(f, "{edge} is not an edge"),
            ConnectionViolation::NotBijective { edge } => {
                write!(f, "map along {edge} is not a bijection of stars")
            }
            ConnectionViolation::Inverse { edge } => {
                write!(
                    f,
                    "axiom 1: map along the reverse of {edge} is not its inverse"
                )
            }
            ConnectionViolation::EdgeToReverse { edge } => {
                write!(f, "axiom 2: {edge} is not sent to its reverse")
            }
            ConnectionViolation::Congruence { edge, element } => {
                write!(f, "axiom 3: {element} along {edge} breaks the congruence")
            }
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct ConnectionReport {
    pub violations: Vec<ConnectionViolation>,
    /// `c_e(e')` for every checked pair.
    pub multipliers: BTreeMap<(DirEdge, DirEdge), i64>,
}

impl ConnectionReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_connection(g: &WeightHypergraph, c: &Connection) -> ConnectionReport {
    let mut rep = ConnectionReport::default();
    for (&e, m) in &c.maps {
        let name = g.describe(e);
        if !g.is_edge(e) {
            rep.violations
                .push(ConnectionViolation::NotAnEdge { edge: name });
            continue;
        }
        let er = g.reverse(e);
        let src: BTreeSet<DirEdge> = g.star(g.origin(e)).iter().copied().collect();
        let dst: BTreeSet<DirEdge> = g.star(g.origin(er)).iter().copied().collect();
        let keys: BTreeSet<DirEdge> = m.keys().copied().collect();
        let vals: BTreeSet<DirEdge> = m.values().copied().collect();
        if keys != src || vals != dst || vals.len() != m.len() {
            rep.violations
                .push(ConnectionViolation::NotBijective { edge: name.clone() });
        }
        if m.get(&e) != Some(&er) {
            rep.violations
                .push(ConnectionViolation::EdgeToReverse { edge: name.clone() });
        }
        if let Some(back) = c.get(er) {
            if m.iter().any(|(x, y)| back.get(y) != Some(x)) {
                rep.violations
                    .push(ConnectionViolation::Inverse { edge: name.clone() });
            }
        }
        for (&x, &y) in m {
            match multiplier(g, e, x, y) {
                Some(k) => {
                    rep.multipliers.insert((e, x), k);
                }
                None => rep.violations.push(ConnectionViolation::Congruence {
                    edge: name.clone(),
                    element: g.describe(x),
                }),
            }
        }
    }
    rep
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgePath(pub Vec<DirEdge>);

impl EdgePath {
    pub fn new(g: &WeightHypergraph, edges: Vec<DirEdge>) -> Result<Self, GraphError> {
        if edges.is_empty() {
            return Err(GraphError::Malformed("empty path".into()));
        }
        for (k, &e) in edges.iter().enumerate() {
            if !g.is_edge(e) {
                return Err(GraphError::NotAnEdge(g.describe(e)));
            }
            if k > 0 && g.end(edges[k - 1]) != g.origin(e) {
                return Err(GraphError::NotComposable(k));
            }
        }
        Ok(EdgePath(edges))
    }

    /// Path through the given vertex labels.
    pub fn through(g: &WeightHypergraph, labels: &[&str]) -> Result<Self, GraphError> {
        let edges = labels
            .windows(2)
            .map(|w| g.dir_edge_by_label(w[0], w[1]))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(g, edges)
    }

    pub fn origin(&self, g: &WeightHypergraph) -> usize {
        g.origin(self.0[0])
    }

    pub fn end(&self, g: &WeightHypergraph) -> usize {
        g.end(*self.0.last().expect("nonempty path"))
    }

    pub fn is_cycle(&self, g: &WeightHypergraph) -> bool {
        self.origin(g) == self.end(g)
    }

    pub fn reversed(&self, g: &WeightHypergraph) -> EdgePath {
        EdgePath(self.0.iter().rev().map(|&e| g.reverse(e)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn parallel_transport(
    g: &WeightHypergraph,
    c: &Connection,
    path: &EdgePath,
    e: DirEdge,
) -> Result<DirEdge, GraphError> {
    let mut cur = e;
    for &step in &path.0 {
        cur = c
            .apply(step, cur)
            .ok_or_else(|| GraphError::PathNotCovered(g.describe(step)))?;
    }
    Ok(cur)
}

/// A connected subgraph of G(Γ), stored with both directions of each edge.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Subgraph {
    pub vertices: BTreeSet<usize>,
    pub edges: BTreeSet<DirEdge>,
}

impl Subgraph {
    pub fn from_edges(g: &WeightHypergraph, edges: impl IntoIterator<Item = DirEdge>) -> Self {
        let mut s = Subgraph::default();
        for e in edges {
            s.vertices.insert(g.origin(e));
            s.vertices.insert(g.end(e));
            s.edges.insert(e);
            s.edges.insert(g.reverse(e));
        }
        s
    }

    pub fn from_path(g: &WeightHypergraph, p: &EdgePath) -> Self {
        Self::from_edges(g, p.0.iter().copied())
    }

    /// A star element at a vertex of the subgraph is internal when all of its
    /// vertices lie in the subgraph.
    pub fn is_internal(&self, g: &WeightHypergraph, x: DirEdge) -> bool {
        g.hyperedges()[x.he]
            .vertices
            .iter()
            .all(|v| self.vertices.contains(v))
    }
}

pub fn is_invariant_subgraph(
    g: &WeightHypergraph,
    c: &Connection,
    sub: &Subgraph,
) -> Result<bool, GraphError> {
    for &e in &sub.edges {
        let m = c
            .get(e)
            .ok_or_else(|| GraphError::PathNotCovered(g.describe(e)))?;
        for &x in g.star(g.origin(e)) {
            if sub.is_internal(g, x) {
                let y = m
                    .get(&x)
                    .ok_or_else(|| GraphError::PathNotCovered(g.describe(e)))?;
                if !sub.is_internal(g, *y) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// restriction to a subtorus

/// Integer k×r matrix sending weights of the big torus to weights of the
/// subtorus, `w ↦ w·M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CocharacterMap {
    matrix: Vec<Vec<i64>>,
}

impl CocharacterMap {
    pub fn new(matrix: Vec<Vec<i64>>) -> Result<Self, GraphError> {
        let r = matrix.first().map_or(0, Vec::len);
        let big = linalg::to_big(&matrix);
        if linalg::rank(&big) != r || !linalg::is_saturated(&big, r) {
            return Err(GraphError::NotSurjective);
        }
        Ok(CocharacterMap { matrix })
    }

    pub fn identity(k: usize) -> Self {
        let m = (0..k)
            .map(|i| (0..k).map(|j| i64::from(i == j)).collect())
            .collect();
        CocharacterMap { matrix: m }
    }

    pub fn source_rank(&self) -> usize {
        self.matrix.len()
    }

    pub fn target_rank(&self) -> usize {
        self.matrix.first().map_or(0, Vec::len)
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn apply(&self, w: &Weight) -> Weight {
        w.apply(&self.matrix)
    }
}

/// Weight hypergraph of the restricted action. Hyperedges whose weights at a
/// common vertex become parallel are merged.
pub fn restrict_action(
    g: &WeightHypergraph,
    f: &CocharacterMap,
) -> Result<WeightHypergraph, GraphError> {
    if f.source_rank() != g.rank() {
        return Err(GraphError::RankMismatch {
            expected: g.rank(),
            found: f.source_rank(),
        });
    }
    let n = g.hyperedges().len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    let image = |d: DirEdge| f.apply(g.alpha(d));
    for v in 0..g.num_vertices() {
        let s = g.star(v);
        for &d in s {
            let w = image(d);
            if w.is_zero() {
                return Err(GraphError::NonIsolatedFixedPoints {
                    vertex: g.label(v).to_string(),
                    weight: g.alpha(d).to_string(),
                });
            }
        }
        for (a, &da) in s.iter().enumerate() {
            for &db in &s[a + 1..] {
                if image(da).parallel(&image(db)) {
                    let (ra, rb) = (find(&mut parent, da.he), find(&mut parent, db.he));
                    if ra != rb {
                        parent[ra.max(rb)] = ra.min(rb);
                    }
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for h in 0..n {
        let r = find(&mut parent, h);
        groups.entry(r).or_default().push(h);
    }
    let mut out = Vec::new();
    for members in groups.values() {
        if let [h] = members.as_slice() {
            let old = &g.hyperedges()[*h];
            if old.dim == 1 {
                let alpha = old.alpha.iter().map(|w| f.apply(w)).collect();
                out.push(Hyperedge {
                    vertices: old.vertices.clone(),
                    dim: 1,
                    alpha,
                });
                continue;
            }
        }
        let verts: BTreeSet<usize> = members
            .iter()
            .flat_map(|&h| g.hyperedges()[h].vertices.iter().copied())
            .collect();
        let verts: Vec<usize> = verts.into_iter().collect();
        let dim_at = |v: usize| -> usize {
            members
                .iter()
                .filter(|&&h| g.hyperedges()[h].vertices.contains(&v))
                .map(|&h| g.hyperedges()[h].dim)
                .sum()
        };
        let dim = dim_at(verts[0]);
        if let Some(&bad) = verts.iter().find(|&&v| dim_at(v) != dim) {
            return Err(GraphError::InconsistentMerge(g.label(bad).to_string()));
        }
        let w = f.apply(&g.hyperedges()[members[0]].alpha[0]);
        out.push(Hyperedge::hyper(verts, dim, &w));
    }
    WeightHypergraph::new(f.target_rank(), g.valence(), g.labels().to_vec(), out)
}

// ---------------------------------------------------------------------------
// serialization

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HyperedgeJson {
    pub vertices: Vec<String>,
    pub dim: usize,
    pub weight: Vec<i64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DirectedPairJson {
    pub from: String,
    pub to: String,
    pub weight: Vec<i64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphJson {
    pub rank: usize,
    pub valence: usize,
    pub vertices: Vec<String>,
    pub hyperedges: Vec<HyperedgeJson>,
    #[serde(default)]
    pub directed_pairs: Vec<DirectedPairJson>,
}

impl WeightHypergraph {
    pub fn to_json(&self) -> GraphJson {
        let mut hyperedges = Vec::new();
        let mut directed_pairs = Vec::new();
        for h in &self.hyperedges {
            let names: Vec<String> = h.vertices.iter().map(|&v| self.labels[v].clone()).collect();
            if h.dim == 1 && h.vertices.len() == 2 {
                for p in 0..2 {
                    directed_pairs.push(DirectedPairJson {
                        from: names[p].clone(),
                        to: names[1 - p].clone(),
                        weight: h.alpha[p].0.clone(),
                    });
                }
            }
            hyperedges.push(HyperedgeJson {
                vertices: names,
                dim: h.dim,
                weight: h.weight().0,
            });
        }
        GraphJson {
            rank: self.rank,
            valence: self.valence,
            vertices: self.labels.clone(),
            hyperedges,
            directed_pairs,
        }
    }

    pub fn from_json(j: &GraphJson) -> Result<Self, GraphError> {
        let index: HashMap<&str, usize> = j
            .vertices
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i))
            .collect();
        let idx = |l: &str| {
            index
                .get(l)
                .copied()
                .ok_or_else(|| GraphError::UnknownVertex(l.to_string()))
        };
        let mut directed: HashMap<(usize, usize), Weight> = HashMap::new();
        for p in &j.directed_pairs {
            directed.insert((idx(&p.from)?, idx(&p.to)?), Weight(p.weight.clone()));
        }
        let mut hs = Vec::new();
        for h in &j.hyperedges {
            let vs = h
                .vertices
                .iter()
                .map(|l| idx(l))
                .collect::<Result<Vec<_>, _>>()?;
            let w = Weight(h.weight.clone());
            let he = if h.dim == 1 && vs.len() == 2 {
                let fw = directed
                    .get(&(vs[0], vs[1]))
                    .cloned()
                    .unwrap_or_else(|| w.clone());
                let bw = directed
                    .get(&(vs[1], vs[0]))
                    .cloned()
                    .unwrap_or_else(|| fw.neg());
                Hyperedge {
                    vertices: vs,
                    dim: 1,
                    alpha: vec![fw, bw],
                }
            } else {
                let n = vs.len();
                Hyperedge {
                    vertices: vs,
                    dim: h.dim,
                    alpha: vec![w; n],
                }
            };
            hs.push(he);
        }
        WeightHypergraph::new(j.rank, j.valence, j.vertices.clone(), hs)
    }

    /// DOT rendering of the genuine subgraph G(Γ), one line per edge.
    pub fn to_dot(&self, name: &str) -> String {
        let mut s = format!("graph \"{name}\" {{\n");
        for v in self.vertices_by_label() {
            s.push_str(&format!("  \"{}\";\n", self.labels[v]));
        }
        let mut lines = Vec::new();
        for h in &self.hyperedges {
            if h.dim == 1 && h.vertices.len() == 2 {
                let (a, b) = (&self.labels[h.vertices[0]], &self.labels[h.vertices[1]]);
                let (a, b, w) = if a <= b {
                    (a, b, &h.alpha[0])
                } else {
                    (b, a, &h.alpha[1])
                };
                lines.push(format!("  \"{a}\" -- \"{b}\" [label=\"{w}\"];\n"));
            }
        }
        lines.sort();
        for l in lines {
            s.push_str(&l);
        }
        s.push_str("}\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p1() -> WeightHypergraph {
        WeightHypergraph::new(
            1,
            1,
            vec!["0".into(), "1".into()],
            vec![Hyperedge::edge(0, 1, Weight(vec![1]))],
        )
        .unwrap()
    }

    /// GKM graph of ℙ² with the standard action of rank 2.
    fn p2() -> WeightHypergraph {
        let e = |a: usize| Weight::e(2, a);
        let w = |a: usize, b: usize| e(b).sub(&e(a));
        let hs = vec![
            Hyperedge::edge(0, 1, w(0, 1)),
            Hyperedge::edge(0, 2, w(0, 2)),
            Hyperedge::edge(1, 2, w(1, 2)),
        ];
        WeightHypergraph::new(2, 2, vec!["0".into(), "1".into(), "2".into()], hs).unwrap()
    }

    #[test]
    fn weight_basics() {
        let w = Weight(vec![0, -2, 4]);
        assert_eq!(w.canonical(), Weight(vec![0, 2, -4]));
        assert_eq!(w.primitive(), Weight(vec![0, -1, 2]));
        assert!(w.parallel(&Weight(vec![0, 1, -2])));
        assert_eq!(w.multiple_of(&Weight(vec![0, 1, -2])), Some(-2));
        assert_eq!(Weight(vec![1, 1]).multiple_of(&Weight(vec![2, 2])), None);
        assert_eq!(Weight::e(3, 0), Weight::zero(3));
    }

    #[test]
    fn p1_is_valid() {
        let g = p1();
        assert!(validate_axial(&g).is_empty());
        let e = g.dir_edge(0, 1).unwrap();
        assert_eq!(g.alpha(g.reverse(e)), &Weight(vec![-1]));
        assert!(is_definite_at(&g, e).unwrap());
    }

    #[test]
    fn p2_forced_transport() {
        let g = p2();
        assert!(validate_axial(&g).is_empty());
        for e in g.edges() {
            let m = forced_transport(&g, e).unwrap();
            let all = admissible_bijections(&g, e);
            assert_eq!(all, vec![m]);
        }
    }

    #[test]
    fn p2_subgraph_invariant() {
        let g = p2();
        let mut c = Connection::new();
        for e in g.edges() {
            c.insert(e, forced_transport(&g, e).unwrap());
        }
        assert!(validate_connection(&g, &c).is_empty());
        let path = EdgePath::through(&g, &["0", "1", "2"]).unwrap();
        let sub = Subgraph::from_path(&g, &path);
        assert!(is_invariant_subgraph(&g, &c, &sub).unwrap());
        let single = Subgraph::from_edges(&g, [g.dir_edge(0, 1).unwrap()]);
        assert!(is_invariant_subgraph(&g, &c, &single).unwrap());
    }

    #[test]
    fn broken_connection_is_reported() {
        let g = p2();
        let e = g.dir_edge(0, 1).unwrap();
        let mut m = forced_transport(&g, e).unwrap();
        let other = g.dir_edge(0, 2).unwrap();
        let (a, b) = (m[&e], m[&other]);
        m.insert(e, b);
        m.insert(other, a);
        let mut c = Connection::new();
        c.insert(e, m);
        let rep = validate_connection(&g, &c);
        assert!(rep
            .violations
            .iter()
            .any(|v| matches!(v, ConnectionViolation::EdgeToReverse { .. })));
    }

    #[test]
    fn restriction_merges_parallel_weights() {
        let g = p2();
        let f = CocharacterMap::new(vec![vec![1], vec![2]]).unwrap();
        // e1 ↦ 1, e2 ↦ 2, so e2 − e1 ↦ 1 and everything becomes parallel
        let h = restrict_action(&g, &f).unwrap();
        assert_eq!(h.hyperedges().len(), 1);
        assert_eq!(h.hyperedges()[0].dim, 2);
        assert_eq!(h.hyperedges()[0].vertices.len(), 3);
        assert!(validate_axial(&h).is_empty());
        let id = restrict_action(&g, &CocharacterMap::identity(2)).unwrap();
        assert_eq!(id.hyperedges(), g.hyperedges());
        assert!(CocharacterMap::new(vec![vec![2], vec![4]]).is_err());
        let bad = CocharacterMap::new(vec![vec![1], vec![1]]).unwrap();
        assert!(matches!(
            restrict_action(&g, &bad),
            Err(GraphError::NonIsolatedFixedPoints { .. })
        ));
    }

    #[test]
    fn json_round_trip() {
        let g = p2();
        let j = g.to_json();
        let s = serde_json::to_string(&j).unwrap();
        let back = WeightHypergraph::from_json(&serde_json::from_str(&s).unwrap()).unwrap();
        assert_eq!(back.hyperedges(), g.hyperedges());
        assert!(g.to_dot("p2").contains("\"0\" -- \"1\" [label=\"(1,0)\"]"));
    }
}

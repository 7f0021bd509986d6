//! Simple polytopes with characteristic matrices, the GKM graphs they
//! define, faces and external-edge monodromy, and the two monodromy
//! obstruction searches.

mod faces;
mod iso;
mod obstruction;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cohomology::HDPolynomial;
use crate::linalg;
use crate::weightgraph::{
    forced_transport, Bijection, Connection, GraphError, Hyperedge, Weight, WeightHypergraph,
};

pub use faces::{check_external_monodromy, polytope_face_subgraph, span_face};
pub use iso::{find_isomorphism, GraphIsomorphism};
pub use obstruction::{
    cycle_obstruction, face_exclusion_at, face_exclusion_obstruction, is_safe, safe_transports,
    search_obstruction, ObstructionWitness, SearchResult, StarRef, TransportStep, WitnessKind,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ToricError {
    #[error("invalid face {0:?}")]
    InvalidFace(Vec<usize>),
    #[error("invalid polytope: {0}")]
    InvalidPolytope(String),
    #[error("characteristic minor at vertex {vertex} has determinant {det}")]
    MinorNotUnimodular { vertex: String, det: i128 },
    #[error("edge {0} is not definite")]
    NotDefinite(String),
    #[error("closure is not {0}-valent")]
    ClosureNotValent(usize),
    #[error("replay failed at step {step}: {reason}")]
    ReplayFailed { step: usize, reason: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A simple polytope given combinatorially: each vertex is the set of the
/// `dim` facets containing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplePolytope {
    dim: usize,
    facets: usize,
    vertices: Vec<BTreeSet<usize>>,
}

impl SimplePolytope {
    pub fn new(
        dim: usize,
        facets: usize,
        vertices: Vec<BTreeSet<usize>>,
    ) -> Result<Self, ToricError> {
        let bad = |s: String| Err(ToricError::InvalidPolytope(s));
        if vertices.is_empty() {
            return bad("no vertices".into());
        }
        let mut seen = BTreeSet::new();
        for v in &vertices {
            if v.len() != dim {
                return bad(format!("vertex {v:?} does not lie on exactly {dim} facets"));
            }
            if v.iter().any(|&f| f >= facets) {
                return bad(format!("vertex {v:?} names an unknown facet"));
            }
            if !seen.insert(v.clone()) {
                return bad(format!("vertex {v:?} repeated"));
            }
        }
        let p = SimplePolytope {
            dim,
            facets,
            vertices,
        };
        for (a, v) in p.vertices.iter().enumerate() {
            for f in v {
                let n = p.neighbors(a).iter().filter(|&&(g, _)| g == *f).count();
                if n > 1 {
                    return bad(format!("edge leaving facet {f} at {v:?} is not unique"));
                }
            }
        }
        let mut reached = BTreeSet::from([0]);
        let mut stack = vec![0];
        while let Some(a) = stack.pop() {
            for (_, b) in p.neighbors(a) {
                if reached.insert(b) {
                    stack.push(b);
                }
            }
        }
        if reached.len() != p.vertices.len() {
            return bad("edge graph is disconnected".into());
        }
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_facets(&self) -> usize {
        self.facets
    }

    pub fn vertices(&self) -> &[BTreeSet<usize>] {
        &self.vertices
    }

    /// Adjacent vertices of vertex `a`, with the facet of `a` that the edge
    /// leaves.
    pub fn neighbors(&self, a: usize) -> Vec<(usize, usize)> {
        let v = &self.vertices[a];
        let mut out = Vec::new();
        for (b, w) in self.vertices.iter().enumerate() {
            if b != a && v.intersection(w).count() + 1 == self.dim {
                let left = *v.difference(w).next().expect("adjacent vertices differ");
                out.push((left, b));
            }
        }
        out.sort();
        out
    }

    pub fn num_edges(&self) -> usize {
        (0..self.vertices.len())
            .map(|a| self.neighbors(a).len())
            .sum::<usize>()
            / 2
    }

    /// Vertices lying on every facet of `face`.
    pub fn face_vertices(&self, face: &BTreeSet<usize>) -> Vec<usize> {
        (0..self.vertices.len())
            .filter(|&a| face.is_subset(&self.vertices[a]))
            .collect()
    }

    /// All nonempty faces of codimension `c`, as facet sets.
    pub fn faces_of_codim(&self, c: usize) -> Vec<BTreeSet<usize>> {
        let mut out = BTreeSet::new();
        for v in &self.vertices {
            for s in v.iter().copied().combinations(c) {
                out.insert(s.into_iter().collect::<BTreeSet<_>>());
            }
        }
        out.into_iter().collect()
    }

    /// f_k = number of k-dimensional faces, k = 0..dim.
    pub fn f_vector(&self) -> Vec<usize> {
        (0..=self.dim)
            .map(|k| self.faces_of_codim(self.dim - k).len())
            .collect()
    }

    /// h(t) = Σ f_k (t − 1)^k; equals the Poincaré polynomial in t = b² of
    /// any toric manifold over the polytope.
    pub fn h_polynomial(&self) -> HDPolynomial {
        let f = self.f_vector();
        let mut h = vec![0i64; self.dim + 1];
        for (k, &fk) in f.iter().enumerate() {
            // (t − 1)^k
            for (s, hs) in h.iter_mut().enumerate().take(k + 1) {
                let sign = if (k - s) % 2 == 0 { 1 } else { -1 };
                *hs += sign * binom(k, s) * fk as i64;
            }
        }
        HDPolynomial::new(h)
    }

    pub fn label(&self, a: usize) -> String {
        self.vertices[a].iter().join(".")
    }
}

fn binom(n: usize, k: usize) -> i64 {
    (0..k).fold(1i64, |acc, t| acc * (n - t) as i64 / (t + 1) as i64)
}

/// I^n with facets 2t, 2t+1 opposite in coordinate t.
pub fn polytope_cube(n: usize) -> SimplePolytope {
    let vertices = (0..1usize << n)
        .map(|m| (0..n).map(|t| 2 * t + ((m >> t) & 1)).collect())
        .collect();
    SimplePolytope::new(n, 2 * n, vertices).expect("cube is simple")
}

/// Δ^n with facets 0..=n.
pub fn polytope_simplex(n: usize) -> SimplePolytope {
    let vertices = (0..=n)
        .map(|skip| (0..=n).filter(|&f| f != skip).collect())
        .collect();
    SimplePolytope::new(n, n + 1, vertices).expect("simplex is simple")
}

/// P × Q; facets of Q are numbered after those of P.
pub fn polytope_product(p: &SimplePolytope, q: &SimplePolytope) -> SimplePolytope {
    let vertices = p
        .vertices
        .iter()
        .cartesian_product(q.vertices.iter())
        .map(|(a, b)| {
            a.iter()
                .copied()
                .chain(b.iter().map(|f| f + p.facets))
                .collect()
        })
        .collect();
    SimplePolytope::new(p.dim + q.dim, p.facets + q.facets, vertices)
        .expect("product of simple polytopes")
}

/// Cut off the face ∩_{F ∈ face} F by a new facet, numbered last.
pub fn polytope_truncate(
    p: &SimplePolytope,
    face: &BTreeSet<usize>,
) -> Result<SimplePolytope, ToricError> {
    let bad = || ToricError::InvalidFace(face.iter().copied().collect());
    if face.is_empty() {
        return Err(bad());
    }
    let on_face = p.face_vertices(face);
    if on_face.is_empty() || on_face.len() == p.vertices.len() {
        return Err(bad());
    }
    let new = p.facets;
    let mut vertices: Vec<BTreeSet<usize>> = Vec::new();
    for (a, v) in p.vertices.iter().enumerate() {
        if !on_face.contains(&a) {
            vertices.push(v.clone());
        }
    }
    for &a in &on_face {
        for &f in face {
            let mut w = p.vertices[a].clone();
            w.remove(&f);
            w.insert(new);
            vertices.push(w);
        }
    }
    SimplePolytope::new(p.dim, p.facets + 1, vertices)
}

/// A simple polytope with an integral characteristic matrix (one column
/// per facet) whose vertex minors are unimodular.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharPair {
    polytope: SimplePolytope,
    lambda: Vec<Vec<i64>>,
}

/// JSON form `{facets, dim, vertices, lambda}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CharPairJson {
    pub facets: usize,
    pub dim: usize,
    pub vertices: Vec<Vec<usize>>,
    pub lambda: Vec<Vec<i64>>,
}

impl CharPair {
    pub fn new(polytope: SimplePolytope, lambda: Vec<Vec<i64>>) -> Result<Self, ToricError> {
        let n = polytope.dim;
        if lambda.len() != n || lambda.iter().any(|r| r.len() != polytope.facets) {
            return Err(ToricError::InvalidPolytope(format!(
                "characteristic matrix must be {n} × {}",
                polytope.facets
            )));
        }
        let cp = CharPair { polytope, lambda };
        for a in 0..cp.polytope.vertices.len() {
            let det = linalg::det_i64(&cp.minor(a));
            if det.abs() != 1 {
                return Err(ToricError::MinorNotUnimodular {
                    vertex: cp.polytope.label(a),
                    det,
                });
            }
        }
        Ok(cp)
    }

    pub fn polytope(&self) -> &SimplePolytope {
        &self.polytope
    }

    pub fn lambda(&self) -> &[Vec<i64>] {
        &self.lambda
    }

    pub fn column(&self, f: usize) -> Vec<i64> {
        self.lambda.iter().map(|r| r[f]).collect()
    }

    /// n × n matrix with columns λ(F), F ∋ vertex, in facet order.
    fn minor(&self, a: usize) -> Vec<Vec<i64>> {
        let fs: Vec<usize> = self.polytope.vertices[a].iter().copied().collect();
        self.lambda
            .iter()
            .map(|r| fs.iter().map(|&f| r[f]).collect())
            .collect()
    }

    /// Dual basis at vertex `a`: facet F ↦ the weight pairing to 1 with
    /// λ(F) and to 0 with the other facets at `a`.
    fn dual_basis(&self, a: usize) -> BTreeMap<usize, Weight> {
        let inv = linalg::unimodular_inverse(&self.minor(a)).expect("minor is unimodular");
        self.polytope.vertices[a]
            .iter()
            .enumerate()
            .map(|(t, &f)| (f, Weight(inv[t].clone())))
            .collect()
    }

    pub fn from_json(j: &CharPairJson) -> Result<Self, ToricError> {
        let p = SimplePolytope::new(
            j.dim,
            j.facets,
            j.vertices
                .iter()
                .map(|v| v.iter().copied().collect())
                .collect(),
        )?;
        CharPair::new(p, j.lambda.clone())
    }

    pub fn to_json(&self) -> CharPairJson {
        CharPairJson {
            facets: self.polytope.facets,
            dim: self.polytope.dim,
            vertices: self
                .polytope
                .vertices
                .iter()
                .map(|v| v.iter().copied().collect())
                .collect(),
            lambda: self.lambda.clone(),
        }
    }
}

impl fmt::Display for CharPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "dim {}, {} facets, {} vertices",
            self.polytope.dim,
            self.polytope.facets,
            self.polytope.vertices.len()
        )?;
        for r in &self.lambda {
            writeln!(f, "  [{}]", r.iter().map(|x| format!("{x:>3}")).join(""))?;
        }
        Ok(())
    }
}

/// GKM graph of the toric manifold and its face-compatible connection.
/// Vertex labels are the facet sets joined by '.'.
pub fn gkm_from_charpair(cp: &CharPair) -> Result<(WeightHypergraph, Connection), ToricError> {
    let p = &cp.polytope;
    let labels: Vec<String> = (0..p.vertices.len()).map(|a| p.label(a)).collect();
    let duals: Vec<BTreeMap<usize, Weight>> =
        (0..p.vertices.len()).map(|a| cp.dual_basis(a)).collect();
    let mut hes = Vec::new();
    for a in 0..p.vertices.len() {
        for (f, b) in p.neighbors(a) {
            if a < b {
                let w = duals[a][&f].clone();
                let entered = *p.vertices[b]
                    .difference(&p.vertices[a])
                    .next()
                    .expect("adjacent");
                let back = &duals[b][&entered];
                if *back != w.neg() && *back != w {
                    return Err(ToricError::InvalidPolytope(format!(
                        "edge from {} to {} has weights {w} and {back}",
                        labels[a], labels[b]
                    )));
                }
                hes.push(Hyperedge::edge(a, b, w));
            }
        }
    }
    let g = WeightHypergraph::new(p.dim, p.dim, labels, hes)?;
    let mut c = Connection::new();
    for a in 0..p.vertices.len() {
        let nb = p.neighbors(a);
        for &(f, b) in &nb {
            let e = g.dir_edge(a, b).expect("polytope edge");
            let entered = *p.vertices[b]
                .difference(&p.vertices[a])
                .next()
                .expect("adjacent");
            let nb_b = p.neighbors(b);
            let mut m = Bijection::new();
            for &(f2, a2) in &nb {
                let x = g.dir_edge(a, a2).expect("polytope edge");
                let left = if f2 == f { entered } else { f2 };
                let (_, b2) = *nb_b
                    .iter()
                    .find(|&&(h, _)| h == left)
                    .expect("simple polytope");
                m.insert(x, g.dir_edge(b, b2).expect("polytope edge"));
            }
            c.insert(e, m);
        }
    }
    Ok((g, c))
}

/// Total connection from forced transports.
pub fn unique_connection(g: &WeightHypergraph) -> Result<Connection, ToricError> {
    let mut c = Connection::new();
    for e in g.edges() {
        match forced_transport(g, e) {
            Ok(m) => c.insert(e, m),
            Err(GraphError::NotDefinite(s)) => return Err(ToricError::NotDefinite(s)),
            Err(err) => return Err(err.into()),
        }
    }
    Ok(c)
}

/// The characteristic pairs of the toric members of the families that
/// are compared against the family graphs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    Br21,
    Br22,
    R22,
    R13,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::Br21, Preset::Br22, Preset::R22, Preset::R13];

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Br21 => "br21",
            Preset::Br22 => "br22",
            Preset::R22 => "r22",
            Preset::R13 => "r13",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == s)
    }

    pub fn family(&self) -> crate::families::Family {
        use crate::families::Family;
        match self {
            Preset::Br21 => Family::Br(2, 1),
            Preset::Br22 => Family::Br(2, 2),
            Preset::R22 => Family::R(2, 2),
            Preset::R13 => Family::R(1, 3),
        }
    }

    pub fn charpair(&self) -> CharPair {
        let set = |v: &[usize]| v.iter().copied().collect::<BTreeSet<usize>>();
        let (p, lambda) = match self {
            // pentagon: square cut at the vertex F1 ∩ F2
            Preset::Br21 => (
                polytope_truncate(&polytope_cube(2), &set(&[1, 2])).expect("vertex of the square"),
                vec![vec![1, -1, 0, 0, -1], vec![0, 0, 1, -1, 1]],
            ),
            Preset::Br22 => (
                polytope_cube(3),
                vec![
                    vec![1, -1, 0, 0, 0, 0],
                    vec![0, 1, 1, -1, 0, 0],
                    vec![0, -2, 0, 1, 1, -1],
                ],
            ),
            Preset::R22 => (
                polytope_truncate(&polytope_cube(3), &set(&[3, 5])).expect("edge of the cube"),
                vec![
                    vec![1, -1, 0, 0, 0, 0, 0],
                    vec![0, 1, 1, -1, 0, 0, -1],
                    vec![0, -2, 0, 1, 1, -1, 0],
                ],
            ),
            Preset::R13 => (
                polytope_truncate(&polytope_cube(3), &set(&[3, 4])).expect("edge of the cube"),
                vec![
                    vec![1, -1, 0, 0, 0, 0, 0],
                    vec![0, 1, 1, -1, 0, 0, -1],
                    vec![0, 0, 0, 0, 1, -1, 1],
                ],
            ),
        };
        CharPair::new(p, lambda).expect("preset matrices are unimodular")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weightgraph::{validate_axial, validate_connection};

    #[test]
    fn counts() {
        let c3 = polytope_cube(3);
        assert_eq!(
            (c3.num_facets(), c3.vertices().len(), c3.num_edges()),
            (6, 8, 12)
        );
        let cut = polytope_truncate(&c3, &BTreeSet::from([3, 5])).unwrap();
        assert_eq!((cut.num_facets(), cut.vertices().len()), (7, 10));
        let s2 = polytope_simplex(2);
        assert_eq!(s2.vertices().len(), 3);
        let prod = polytope_product(&polytope_cube(2), &polytope_simplex(1));
        assert_eq!(prod.f_vector(), c3.f_vector());
        assert_eq!(c3.h_polynomial().coeffs, vec![1, 3, 3, 1]);
        assert_eq!(cut.h_polynomial().coeffs, vec![1, 4, 4, 1]);
        assert!(polytope_truncate(&c3, &BTreeSet::from([0, 1])).is_err());
        assert!(polytope_truncate(&c3, &BTreeSet::new()).is_err());
    }

    #[test]
    fn projective_plane() {
        let cp = CharPair::new(polytope_simplex(2), vec![vec![1, 0, -1], vec![0, 1, -1]]).unwrap();
        let (g, c) = gkm_from_charpair(&cp).unwrap();
        assert!(validate_axial(&g).is_empty());
        assert!(validate_connection(&g, &c).is_empty());
        assert_eq!(unique_connection(&g).unwrap(), c);
        assert!(CharPair::new(polytope_simplex(2), vec![vec![1, 0, -1], vec![0, 2, -1]]).is_err());
    }

    #[test]
    fn presets_are_valid() {
        for p in Preset::ALL {
            let cp = p.charpair();
            let (g, c) = gkm_from_charpair(&cp).unwrap();
            assert!(
                validate_axial(&g).is_empty(),
                "{}: {}",
                p.name(),
                validate_axial(&g)
            );
            assert!(validate_connection(&g, &c).is_empty(), "{}", p.name());
            assert_eq!(unique_connection(&g).unwrap(), c, "{}", p.name());
            let json = cp.to_json();
            assert_eq!(CharPair::from_json(&json).unwrap(), cp);
        }
    }
}

use std::collections::{BTreeMap, BTreeSet};

use super::{FamilyError, FlagIndex};
use crate::weightgraph::{CocharacterMap, Hyperedge, Weight, WeightHypergraph};

/// Lattice of the weights e_m, m ∈ [lo, hi], with e_0 = 0.
#[derive(Clone, Copy)]
struct Coords {
    lo: i64,
    hi: i64,
}

impl Coords {
    fn rank(&self) -> usize {
        (self.hi.max(0) + (-self.lo).max(0)) as usize
    }

    fn e(&self, m: i64) -> Weight {
        let mut w = Weight::zero(self.rank());
        if m > 0 {
            w.0[(m - 1) as usize] = 1;
        } else if m < 0 {
            w.0[(self.hi.max(0) - m - 1) as usize] = 1;
        }
        w
    }

    fn diff(&self, a: i64, b: i64) -> Weight {
        self.e(a).sub(&self.e(b))
    }
}

/// Accumulates hyperedges and directed sphere candidates, then pairs them.
struct Builder {
    labels: Vec<String>,
    index: BTreeMap<String, usize>,
    hyper: BTreeMap<Vec<usize>, Weight>,
    spheres: BTreeMap<(usize, usize), Weight>,
}

impl Builder {
    fn new(labels: Vec<String>) -> Self {
        let index = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i))
            .collect();
        Builder {
            labels,
            index,
            hyper: BTreeMap::new(),
            spheres: BTreeMap::new(),
        }
    }

    fn id(&self, label: &str) -> Result<usize, FamilyError> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| FamilyError::Inconsistent(format!("`{label}` is not a fixed point")))
    }

    fn hyperedge(&mut self, vs: &[String], w: Weight) -> Result<(), FamilyError> {
        let mut ids = vs
            .iter()
            .map(|l| self.id(l))
            .collect::<Result<Vec<_>, _>>()?;
        ids.sort();
        ids.dedup();
        if ids.len() != vs.len() {
            return Err(FamilyError::Inconsistent(format!(
                "degenerate hyperedge {vs:?}"
            )));
        }
        let c = w.canonical();
        match self.hyper.get(&ids) {
            Some(old) if *old != c => Err(FamilyError::Inconsistent(format!(
                "hyperedge {vs:?} has weights {old} and {c}"
            ))),
            _ => {
                self.hyper.insert(ids, c);
                Ok(())
            }
        }
    }

    fn sphere(&mut self, from: &str, to: &str, w: Weight) -> Result<(), FamilyError> {
        let (a, b) = (self.id(from)?, self.id(to)?);
        match self.spheres.get(&(a, b)) {
            Some(old) if *old != w => Err(FamilyError::Inconsistent(format!(
                "sphere {from} → {to} has weights {old} and {w}"
            ))),
            _ => {
                self.spheres.insert((a, b), w);
                Ok(())
            }
        }
    }

    fn finish(self, coords: Coords, valence: usize) -> Result<WeightHypergraph, FamilyError> {
        let mut hes: Vec<Hyperedge> = self
            .hyper
            .iter()
            .map(|(vs, w)| Hyperedge::hyper(vs.clone(), 2, w))
            .collect();
        let sets: Vec<BTreeSet<usize>> = self
            .hyper
            .keys()
            .map(|vs| vs.iter().copied().collect())
            .collect();
        for (&(a, b), w) in &self.spheres {
            if a > b {
                continue;
            }
            let back = self.spheres.get(&(b, a)).ok_or_else(|| {
                FamilyError::Inconsistent(format!(
                    "sphere {} → {} has no reverse",
                    self.labels[a], self.labels[b]
                ))
            })?;
            if *back != w.neg() {
                return Err(FamilyError::Inconsistent(format!(
                    "sphere from {} to {} has weights {w} and {back}",
                    self.labels[a], self.labels[b]
                )));
            }
            if sets.iter().any(|s| s.contains(&a) && s.contains(&b)) {
                continue;
            }
            hes.push(Hyperedge::edge(a, b, w.clone()));
        }
        for &(a, b) in self.spheres.keys() {
            if !self.spheres.contains_key(&(b, a)) {
                return Err(FamilyError::Inconsistent(format!(
                    "sphere {} → {} has no reverse",
                    self.labels[a], self.labels[b]
                )));
            }
        }
        let g = WeightHypergraph::new(coords.rank(), valence, self.labels, hes)?;
        drop_unused_coordinates(&g)
    }
}

fn used_coordinates(weights: impl Iterator<Item = Weight>, rank: usize) -> Vec<usize> {
    let mut used = vec![false; rank];
    for w in weights {
        for (c, &x) in w.0.iter().enumerate() {
            if x != 0 {
                used[c] = true;
            }
        }
    }
    (0..rank).filter(|&c| used[c]).collect()
}

fn projection(keep: &[usize], rank: usize) -> CocharacterMap {
    let m = (0..rank)
        .map(|t| keep.iter().map(|&c| (t == c) as i64).collect())
        .collect();
    CocharacterMap::new(m).expect("coordinate projection is surjective")
}

fn drop_unused_coordinates(g: &WeightHypergraph) -> Result<WeightHypergraph, FamilyError> {
    let keep = used_coordinates(
        g.hyperedges().iter().flat_map(|h| h.alpha.iter().cloned()),
        g.rank(),
    );
    if keep.len() == g.rank() {
        return Ok(g.clone());
    }
    let p = projection(&keep, g.rank());
    let hes = g
        .hyperedges()
        .iter()
        .map(|h| Hyperedge {
            vertices: h.vertices.clone(),
            dim: h.dim,
            alpha: h.alpha.iter().map(|w| p.apply(w)).collect(),
        })
        .collect();
    Ok(WeightHypergraph::new(
        keep.len(),
        g.valence(),
        g.labels().to_vec(),
        hes,
    )?)
}

// ---------------------------------------------------------------------------
// BF_n

pub fn bf_graph(n: usize) -> Result<WeightHypergraph, FamilyError> {
    if n == 0 {
        return Err(FamilyError::InvalidParams("BF_n needs n ≥ 1".into()));
    }
    let coords = Coords {
        lo: 0,
        hi: n as i64,
    };
    let verts = FlagIndex::all(n);
    let mut b = Builder::new(verts.iter().map(|u| u.to_string()).collect());
    for u in &verts {
        for q in 1..=n {
            let w = coords.diff(u.b(q) as i64, u.a(q) as i64);
            b.sphere(&u.to_string(), &u.flip(q).to_string(), w)?;
        }
    }
    b.finish(coords, n)
}

// ---------------------------------------------------------------------------
// BR_{i,j}

/// Fixed point x_{u,k} of BR_{i,j}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BrVertex {
    pub u: FlagIndex,
    pub k: usize,
}

impl BrVertex {
    pub fn label(&self) -> String {
        format!("{},{}", self.u, self.k)
    }

    pub fn parse(s: &str) -> Result<Self, FamilyError> {
        let (u, k) = s
            .split_once(',')
            .ok_or_else(|| FamilyError::InvalidParams(format!("expected u,k in `{s}`")))?;
        let k = k
            .parse()
            .map_err(|_| FamilyError::InvalidParams(format!("bad index in `{s}`")))?;
        Ok(BrVertex { u: u.parse()?, k })
    }
}

fn br_vertices(i: usize, j: usize) -> Vec<BrVertex> {
    let d = i as i64 - j as i64;
    let mut out = Vec::new();
    for u in FlagIndex::all(i) {
        for k in 0..=j {
            if u.top() as i64 != k as i64 + d {
                out.push(BrVertex { u: u.clone(), k });
            }
        }
    }
    out
}

fn br_coords(i: usize, j: usize) -> Coords {
    Coords {
        lo: (i as i64 - j as i64).min(0),
        hi: i as i64,
    }
}

fn br_tangent_full(i: usize, j: usize, x: &BrVertex) -> Vec<Weight> {
    let c = br_coords(i, j);
    let d = i as i64 - j as i64;
    let u = &x.u;
    let kk = x.k as i64 + d;
    let mut ws: Vec<Weight> = (1..=i)
        .map(|q| c.diff(u.b(q) as i64, u.a(q) as i64))
        .collect();
    ws.extend(
        (0..=j)
            .filter(|&r| r != x.k)
            .map(|r| c.diff(kk, r as i64 + d)),
    );
    let normal = c.diff(kk, u.top() as i64);
    if let Some(p) = ws.iter().position(|w| *w == normal) {
        ws.remove(p);
    }
    ws
}

fn br_keep(i: usize, j: usize) -> Vec<usize> {
    let all = br_vertices(i, j);
    used_coordinates(
        all.iter().flat_map(|x| br_tangent_full(i, j, x)),
        br_coords(i, j).rank(),
    )
}

/// Tangent weights at x_{u,k}: {b(q)} ∪ {b'(r) : r ≠ k} with one copy of the
/// normal weight e_{k+(i-j)} − e_{a_i(u)} removed, in the coordinates of
/// `br_graph(i, j)`.
pub fn br_tangent_weights(i: usize, j: usize, x: &BrVertex) -> Result<Vec<Weight>, FamilyError> {
    check_br(i, j)?;
    if !br_vertices(i, j).contains(x) {
        return Err(FamilyError::InvalidParams(format!(
            "{} is not a fixed point",
            x.label()
        )));
    }
    let p = projection(&br_keep(i, j), br_coords(i, j).rank());
    Ok(br_tangent_full(i, j, x)
        .iter()
        .map(|w| p.apply(w))
        .collect())
}

fn check_br(i: usize, j: usize) -> Result<(), FamilyError> {
    if i == 0 {
        return Err(FamilyError::InvalidParams("BR_{i,j} needs i ≥ 1".into()));
    }
    if i + j < 2 {
        return Err(FamilyError::InvalidParams("BR_{1,0} is a point".into()));
    }
    Ok(())
}

pub fn br_graph(i: usize, j: usize) -> Result<WeightHypergraph, FamilyError> {
    check_br(i, j)?;
    let c = br_coords(i, j);
    let d = i as i64 - j as i64;
    let verts = br_vertices(i, j);
    let mut b = Builder::new(verts.iter().map(BrVertex::label).collect());
    let lab = |u: &FlagIndex, k: usize| format!("{u},{k}");
    for x in &verts {
        let (u, k) = (&x.u, x.k);
        let kk = k as i64 + d;
        let top = u.top() as i64;
        // ℙ¹×ℙ¹ families from 2-dependent pairs
        for q in 1..=i {
            let pair: BTreeSet<i64> = [u.a(q) as i64, u.b(q) as i64].into();
            for r in (0..=j).filter(|&r| r != k) {
                let rr = r as i64 + d;
                if pair == BTreeSet::from([kk, rr]) && pair != BTreeSet::from([kk, top]) {
                    let uq = u.flip(q);
                    b.hyperedge(
                        &[lab(u, k), lab(&uq, k), lab(u, r), lab(&uq, r)],
                        c.diff(kk, rr),
                    )?;
                }
            }
        }
        for r in 0..=j {
            let rr = r as i64 + d;
            if r != k && rr != top {
                b.sphere(&lab(u, k), &lab(u, r), c.diff(kk, rr))?;
            }
        }
        for q in 1..=i {
            let uq = u.flip(q);
            let w = c.diff(u.b(q) as i64, u.a(q) as i64);
            if uq.top() as i64 != kk {
                b.sphere(&lab(u, k), &lab(&uq, k), w)?;
            } else if top >= d && top - d <= j as i64 {
                b.sphere(&lab(u, k), &lab(&uq, (top - d) as usize), w)?;
            }
        }
    }
    b.finish(c, i + j - 1)
}

// ---------------------------------------------------------------------------
// R_{i,j}

/// Fixed point x_{u,v} of R_{i,j}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RVertex {
    pub u: FlagIndex,
    pub v: FlagIndex,
}

impl RVertex {
    pub fn label(&self) -> String {
        format!("{},{}", self.u, self.v)
    }

    pub fn parse(s: &str) -> Result<Self, FamilyError> {
        let (u, v) = s
            .split_once(',')
            .ok_or_else(|| FamilyError::InvalidParams(format!("expected u,v in `{s}`")))?;
        Ok(RVertex {
            u: u.parse()?,
            v: v.parse()?,
        })
    }
}

fn r_vertices(i: usize, j: usize) -> Vec<RVertex> {
    let d = i as i64 - j as i64;
    let mut out = Vec::new();
    for u in FlagIndex::all(i) {
        for v in FlagIndex::all(j) {
            if u.top() as i64 != v.top() as i64 + d {
                out.push(RVertex { u: u.clone(), v });
            }
        }
    }
    out
}

fn r_tangent_full(i: usize, j: usize, x: &RVertex) -> Vec<Weight> {
    let c = Coords {
        lo: 0,
        hi: i as i64,
    };
    let d = i as i64 - j as i64;
    let (u, v) = (&x.u, &x.v);
    let mut ws: Vec<Weight> = (1..=i)
        .map(|q| c.diff(u.b(q) as i64, u.a(q) as i64))
        .collect();
    ws.extend((1..=j).map(|s| c.diff(v.a(s) as i64 + d, v.b(s) as i64 + d)));
    let normal = c.diff(v.top() as i64 + d, u.top() as i64);
    if let Some(p) = ws.iter().position(|w| *w == normal) {
        ws.remove(p);
    }
    ws
}

fn check_r(i: usize, j: usize) -> Result<(), FamilyError> {
    if i + j < 2 {
        return Err(FamilyError::InvalidParams("R_{i,j} needs i + j ≥ 2".into()));
    }
    Ok(())
}

/// Tangent weights at x_{u,v} in the coordinates of `r_graph(i, j)`, for
/// i ≥ j.
pub fn r_tangent_weights(i: usize, j: usize, x: &RVertex) -> Result<Vec<Weight>, FamilyError> {
    check_r(i, j)?;
    if i < j {
        return Err(FamilyError::InvalidParams(
            "tangent weights are given for i ≥ j".into(),
        ));
    }
    if !r_vertices(i, j).contains(x) {
        return Err(FamilyError::InvalidParams(format!(
            "{} is not a fixed point",
            x.label()
        )));
    }
    let keep = used_coordinates(
        r_vertices(i, j)
            .iter()
            .flat_map(|y| r_tangent_full(i, j, y)),
        i,
    );
    let p = projection(&keep, i);
    Ok(r_tangent_full(i, j, x).iter().map(|w| p.apply(w)).collect())
}

pub fn r_graph(i: usize, j: usize) -> Result<WeightHypergraph, FamilyError> {
    check_r(i, j)?;
    if i < j {
        let g = r_graph(j, i)?;
        let labels = g
            .labels()
            .iter()
            .map(|l| {
                let (u, v) = l.split_once(',').expect("R labels are pairs");
                format!("{v},{u}")
            })
            .collect();
        return Ok(WeightHypergraph::new(
            g.rank(),
            g.valence(),
            labels,
            g.hyperedges().to_vec(),
        )?);
    }
    let c = Coords {
        lo: 0,
        hi: i as i64,
    };
    let d = i as i64 - j as i64;
    let verts = r_vertices(i, j);
    let mut b = Builder::new(verts.iter().map(RVertex::label).collect());
    let lab = |u: &FlagIndex, v: &FlagIndex| format!("{u},{v}");
    for x in &verts {
        let (u, v) = (&x.u, &x.v);
        let top = u.top() as i64;
        let vtop = v.top() as i64 + d;
        for q in 1..=i {
            let pair: BTreeSet<i64> = [u.a(q) as i64, u.b(q) as i64].into();
            for s in 1..=j {
                let other: BTreeSet<i64> = [v.a(s) as i64 + d, v.b(s) as i64 + d].into();
                if pair == other && pair != BTreeSet::from([vtop, top]) {
                    let (uq, vs) = (u.flip(q), v.flip(s));
                    let w = c.diff(u.b(q) as i64, u.a(q) as i64);
                    b.hyperedge(&[lab(u, v), lab(&uq, v), lab(u, &vs), lab(&uq, &vs)], w)?;
                }
            }
        }
        let mut castle_q = None;
        for q in 1..=i {
            let uq = u.flip(q);
            if uq.top() as i64 != vtop {
                b.sphere(
                    &lab(u, v),
                    &lab(&uq, v),
                    c.diff(u.b(q) as i64, u.a(q) as i64),
                )?;
            } else {
                castle_q = Some(uq);
            }
        }
        let mut castle_s = None;
        for s in 1..=j {
            let vs = v.flip(s);
            if vs.top() as i64 + d != top {
                b.sphere(
                    &lab(u, v),
                    &lab(u, &vs),
                    c.diff(v.a(s) as i64 + d, v.b(s) as i64 + d),
                )?;
            } else {
                castle_s = Some(vs);
            }
        }
        if let (Some(uq), Some(vs)) = (castle_q, castle_s) {
            b.sphere(&lab(u, v), &lab(&uq, &vs), c.diff(vtop, top))?;
        }
    }
    b.finish(c, i + j - 1)
}

// ---------------------------------------------------------------------------
// H_{i,j}

/// Milnor hypersurface Σ z_k w_k = 0 in ℙ^i × ℙ^j (i ≤ j) with the torus
/// (t_1..t_j) acting by t_a on z_a and t_b^{-1} on w_b.
pub fn hij_graph(i: usize, j: usize) -> Result<WeightHypergraph, FamilyError> {
    if !(1 <= i && i <= j) {
        return Err(FamilyError::InvalidParams("H_{i,j} needs 1 ≤ i ≤ j".into()));
    }
    let c = Coords {
        lo: 0,
        hi: j as i64,
    };
    let verts: Vec<(usize, usize)> = (0..=i)
        .flat_map(|a| (0..=j).map(move |b| (a, b)))
        .filter(|(a, b)| a != b)
        .collect();
    let lab = |a: usize, b: usize| format!("{a},{b}");
    let labels: Vec<String> = verts.iter().map(|&(a, b)| lab(a, b)).collect();
    let index: BTreeMap<(usize, usize), usize> =
        verts.iter().enumerate().map(|(n, &p)| (p, n)).collect();
    let mut hes = Vec::new();
    let mut push = |x: (usize, usize), y: (usize, usize), w: Weight| {
        if index[&x] < index[&y] {
            hes.push(Hyperedge::edge(index[&x], index[&y], w));
        }
    };
    for &(a, b) in &verts {
        for a2 in (0..=i).filter(|&t| t != a && t != b) {
            push((a, b), (a2, b), c.diff(a2 as i64, a as i64));
        }
        for b2 in (0..=j).filter(|&t| t != b && t != a) {
            push((a, b), (a, b2), c.diff(b as i64, b2 as i64));
        }
        if b <= i {
            push((a, b), (b, a), c.diff(b as i64, a as i64));
        }
    }
    let g = WeightHypergraph::new(c.rank(), i + j - 1, labels, hes)?;
    for v in 0..g.num_vertices() {
        if let Some(&d) = g.star(v).iter().find(|&&d| g.alpha(d).is_zero()) {
            return Err(FamilyError::Graph(
                crate::weightgraph::GraphError::NonIsolatedFixedPoints {
                    vertex: g.label(v).to_string(),
                    weight: g.alpha(d).to_string(),
                },
            ));
        }
    }
    // parallel weights at a vertex would be one ℙ¹×ℙ¹; merge them
    let merged = crate::weightgraph::restrict_action(&g, &CocharacterMap::identity(g.rank()))?;
    Ok(merged)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weightgraph::validate_axial;

    #[test]
    fn bf2_weights() {
        let g = bf_graph(2).unwrap();
        let v = g.vertex("00").unwrap();
        let mut ws: Vec<Vec<i64>> = g.star_weights(v).into_iter().map(|w| w.0).collect();
        ws.sort();
        assert_eq!(ws, vec![vec![0, 1], vec![1, 0]]);
        let v = g.vertex("11").unwrap();
        let e = g.dir_edge_by_label("11", "01").unwrap();
        assert_eq!(g.alpha(e).0, vec![-1, 0]);
        let e = g.dir_edge_by_label("11", "10").unwrap();
        assert_eq!(g.alpha(e).0, vec![1, -1]);
        assert_eq!(g.star(v).len(), 2);
    }

    #[test]
    fn small_graphs_validate() {
        for n in 1..=6 {
            let g = bf_graph(n).unwrap();
            assert!(
                validate_axial(&g).is_empty(),
                "bf {n}: {}",
                validate_axial(&g)
            );
        }
        for i in 1..=5 {
            for j in 0..=5 {
                if i + j < 2 {
                    continue;
                }
                let g = br_graph(i, j).unwrap();
                assert!(
                    validate_axial(&g).is_empty(),
                    "br {i},{j}: {}",
                    validate_axial(&g)
                );
            }
        }
        for i in 0..=5 {
            for j in 0..=5 {
                if i + j < 2 {
                    continue;
                }
                let g = r_graph(i, j).unwrap();
                assert!(
                    validate_axial(&g).is_empty(),
                    "r {i},{j}: {}",
                    validate_axial(&g)
                );
            }
        }
        for i in 1..=3 {
            for j in i..=4 {
                let g = hij_graph(i, j).unwrap();
                assert!(
                    validate_axial(&g).is_empty(),
                    "h {i},{j}: {}",
                    validate_axial(&g)
                );
                assert_eq!(g.num_vertices(), (i + 1) * (j + 1) - (i + 1));
            }
        }
    }
}

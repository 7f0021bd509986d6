use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;

use crate::linalg;
use crate::weightgraph::{restrict_action, CocharacterMap, Weight, WeightHypergraph};

/// A match of `small` with the restriction of `big` along `map`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphIsomorphism {
    /// big-graph vertex for each small-graph vertex
    pub vertices: Vec<usize>,
    pub map: CocharacterMap,
}

/// Find a surjection M of weight lattices and a vertex bijection under
/// which `small` is the restriction of `big` along M. With equal ranks
/// this is isomorphism up to lattice automorphism and relabeling.
pub fn find_isomorphism(
    small: &WeightHypergraph,
    big: &WeightHypergraph,
) -> Option<GraphIsomorphism> {
    if small.num_vertices() != big.num_vertices()
        || small.valence() != big.valence()
        || small.rank() > big.rank()
        || !big.is_graph()
    {
        return None;
    }
    let v0 = small.vertices_by_label()[0];
    let sstar = small.star(v0);
    let n = big.rank();
    for w0 in 0..big.num_vertices() {
        let bstar = big.star(w0);
        if bstar.len() != n {
            return None;
        }
        let basis: Vec<Vec<i64>> = bstar.iter().map(|&d| big.alpha(d).0.clone()).collect();
        let Some(inv) = linalg::unimodular_inverse(&basis) else {
            continue;
        };
        // slots: one per tangent direction at v0
        let slots: Vec<usize> = sstar
            .iter()
            .enumerate()
            .flat_map(|(k, &d)| vec![k; small.dim(d)])
            .collect();
        for perm in (0..n).permutations(n) {
            let hyper: Vec<usize> = (0..n)
                .filter(|&t| !small.is_edge(sstar[slots[perm[t]]]))
                .collect();
            for signs in 0..1u32 << hyper.len() {
                // images of the big basis weights
                let mut rows = Vec::with_capacity(n);
                for t in 0..n {
                    let mut w = small.alpha(sstar[slots[perm[t]]]).clone();
                    if let Some(p) = hyper.iter().position(|&h| h == t) {
                        if (signs >> p) & 1 == 1 {
                            w = w.neg();
                        }
                    }
                    rows.push(w.0);
                }
                // M with basis_t · M = rows_t, i.e. M = basis⁻¹ · rows
                let m: Vec<Vec<i64>> = (0..n)
                    .map(|a| {
                        (0..small.rank())
                            .map(|b| (0..n).map(|t| inv[a][t] * rows[t][b]).sum())
                            .collect()
                    })
                    .collect();
                let Ok(map) = CocharacterMap::new(m) else {
                    continue;
                };
                let Ok(r) = restrict_action(big, &map) else {
                    continue;
                };
                if let Some(vs) = match_fixed_weights(small, &r, v0, w0) {
                    return Some(GraphIsomorphism { vertices: vs, map });
                }
            }
        }
    }
    None
}

fn edge_key(g: &WeightHypergraph, v: usize) -> Vec<(usize, Vec<i64>)> {
    let mut k: Vec<(usize, Vec<i64>)> = g
        .star(v)
        .iter()
        .map(|&d| {
            let w = if g.is_edge(d) {
                g.alpha(d).clone()
            } else {
                g.alpha(d).canonical()
            };
            (g.dim(d), w.0)
        })
        .collect();
    k.sort();
    k
}

/// Vertex bijection with v0 ↦ w0 preserving hyperedges, dimensions and
/// weights (hyperedge labels up to sign).
fn match_fixed_weights(
    a: &WeightHypergraph,
    b: &WeightHypergraph,
    v0: usize,
    w0: usize,
) -> Option<Vec<usize>> {
    if a.hyperedges().len() != b.hyperedges().len() || edge_key(a, v0) != edge_key(b, w0) {
        return None;
    }
    let bkeys: Vec<_> = (0..b.num_vertices()).map(|w| edge_key(b, w)).collect();
    let bsets: BTreeMap<BTreeSet<usize>, usize> = b
        .hyperedges()
        .iter()
        .enumerate()
        .map(|(h, e)| (e.vertices.iter().copied().collect(), h))
        .collect();
    // BFS order on a so that each vertex after the first has a placed neighbour
    let mut order = vec![v0];
    let mut seen = BTreeSet::from([v0]);
    let mut k = 0;
    while k < order.len() {
        for &d in a.star(order[k]) {
            for &x in &a.hyperedges()[d.he].vertices {
                if seen.insert(x) {
                    order.push(x);
                }
            }
        }
        k += 1;
    }
    if order.len() != a.num_vertices() {
        return None;
    }
    let mut phi = vec![usize::MAX; a.num_vertices()];
    let mut used = vec![false; b.num_vertices()];
    phi[v0] = w0;
    used[w0] = true;
    if place(a, b, &order, 1, &mut phi, &mut used, &bkeys, &bsets) {
        Some(phi)
    } else {
        None
    }
}

#[allow(clippy::too_many_arguments)]
fn place(
    a: &WeightHypergraph,
    b: &WeightHypergraph,
    order: &[usize],
    k: usize,
    phi: &mut [usize],
    used: &mut [bool],
    bkeys: &[Vec<(usize, Vec<i64>)>],
    bsets: &BTreeMap<BTreeSet<usize>, usize>,
) -> bool {
    if k == order.len() {
        return a.hyperedges().iter().all(|h| {
            let img: BTreeSet<usize> = h.vertices.iter().map(|&v| phi[v]).collect();
            match bsets.get(&img) {
                Some(&hb) => {
                    let hb = &b.hyperedges()[hb];
                    hb.dim == h.dim
                        && h.vertices.iter().enumerate().all(|(p, &v)| {
                            let q = hb
                                .vertices
                                .iter()
                                .position(|&w| w == phi[v])
                                .expect("same vertex set");
                            same_weight(&h.alpha[p], &hb.alpha[q], h.dim == 1)
                        })
                }
                None => false,
            }
        });
    }
    let v = order[k];
    let key = edge_key(a, v);
    for w in 0..b.num_vertices() {
        if used[w] || bkeys[w] != key {
            continue;
        }
        // every placed neighbour through an edge must be adjacent with equal weight
        let ok = a.star(v).iter().all(|&d| {
            a.hyperedges()[d.he].vertices.iter().all(|&x| {
                if x == v || phi[x] == usize::MAX {
                    return true;
                }
                match b.dir_edge(w, phi[x]) {
                    Some(db) => {
                        b.dim(db) == a.dim(d) && same_weight(a.alpha(d), b.alpha(db), a.is_edge(d))
                    }
                    None => false,
                }
            })
        });
        if !ok {
            continue;
        }
        phi[v] = w;
        used[w] = true;
        if place(a, b, order, k + 1, phi, used, bkeys, bsets) {
            return true;
        }
        phi[v] = usize::MAX;
        used[w] = false;
    }
    false
}

fn same_weight(x: &Weight, y: &Weight, exact: bool) -> bool {
    if exact {
        x == y
    } else {
        x.canonical() == y.canonical()
    }
}

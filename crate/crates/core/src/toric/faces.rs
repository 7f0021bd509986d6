use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::{SimplePolytope, ToricError};
use crate::weightgraph::{Connection, DirEdge, GraphError, Subgraph, WeightHypergraph};

/// Closure of `edges` at `v` under transport along its own edges: the
/// unique face containing them.
pub fn span_face(
    g: &WeightHypergraph,
    c: &Connection,
    v: usize,
    edges: &[DirEdge],
) -> Result<Subgraph, ToricError> {
    let r = edges.len();
    let seed: BTreeSet<DirEdge> = edges.iter().copied().collect();
    if seed.len() != r || edges.iter().any(|&e| g.origin(e) != v || !g.is_edge(e)) {
        return Err(ToricError::ClosureNotValent(r));
    }
    let mut sets: BTreeMap<usize, BTreeSet<DirEdge>> = BTreeMap::from([(v, seed)]);
    let mut queue = VecDeque::from([v]);
    while let Some(w) = queue.pop_front() {
        let s = sets[&w].clone();
        for &e in &s {
            let m = c
                .get(e)
                .ok_or_else(|| GraphError::PathNotCovered(g.describe(e)))?;
            let image: BTreeSet<DirEdge> = s
                .iter()
                .map(|x| {
                    m.get(x)
                        .copied()
                        .ok_or_else(|| GraphError::PathNotCovered(g.describe(e)))
                })
                .collect::<Result<_, _>>()?;
            let end = g.end(e);
            match sets.get(&end) {
                Some(old) if *old != image => return Err(ToricError::ClosureNotValent(r)),
                Some(_) => {}
                None => {
                    sets.insert(end, image);
                    queue.push_back(end);
                }
            }
        }
    }
    Ok(Subgraph::from_edges(g, sets.into_values().flatten()))
}

/// The subgraph of the polytope face ∩ face, in a graph built by
/// `gkm_from_charpair`.
pub fn polytope_face_subgraph(
    g: &WeightHypergraph,
    p: &SimplePolytope,
    face: &BTreeSet<usize>,
) -> Subgraph {
    let verts: BTreeSet<usize> = p.face_vertices(face).into_iter().collect();
    let edges = g
        .edges()
        .into_iter()
        .filter(|&e| verts.contains(&g.origin(e)) && verts.contains(&g.end(e)));
    let mut s = Subgraph::from_edges(g, edges);
    s.vertices.extend(verts);
    s
}

fn face_star(g: &WeightHypergraph, face: &Subgraph, v: usize) -> BTreeSet<DirEdge> {
    g.star(v)
        .iter()
        .copied()
        .filter(|d| face.edges.contains(d))
        .collect()
}

/// True iff transport along every face edge sends external elements to
/// external elements, and the monodromy of every simple cycle of length
/// ≤ `max_len` in the face fixes each external element at its base.
pub fn check_external_monodromy(
    g: &WeightHypergraph,
    c: &Connection,
    face: &Subgraph,
    max_len: usize,
) -> bool {
    for &e in &face.edges {
        let Some(m) = c.get(e) else { return false };
        let (a, b) = (g.origin(e), g.end(e));
        let (fa, fb) = (face_star(g, face, a), face_star(g, face, b));
        for &x in g.star(a) {
            match m.get(&x) {
                Some(y) if fa.contains(&x) == fb.contains(y) => {}
                _ => return false,
            }
        }
    }
    let order: Vec<usize> = face.vertices.iter().copied().collect();
    for &base in &order {
        let external: Vec<DirEdge> = g
            .star(base)
            .iter()
            .copied()
            .filter(|d| !face.edges.contains(d))
            .collect();
        let mut path = Vec::new();
        let mut on_path = BTreeSet::from([base]);
        if !cycles_fix(
            g,
            c,
            face,
            base,
            base,
            max_len,
            &mut path,
            &mut on_path,
            &external,
        ) {
            return false;
        }
    }
    true
}

#[allow(clippy::too_many_arguments)]
fn cycles_fix(
    g: &WeightHypergraph,
    c: &Connection,
    face: &Subgraph,
    base: usize,
    at: usize,
    max_len: usize,
    path: &mut Vec<DirEdge>,
    on_path: &mut BTreeSet<usize>,
    external: &[DirEdge],
) -> bool {
    if path.len() >= max_len {
        return true;
    }
    for &e in g.star(at) {
        if !face.edges.contains(&e) {
            continue;
        }
        let end = g.end(e);
        path.push(e);
        if end == base && path.len() >= 3 {
            for &x in external {
                let mut cur = x;
                for &s in path.iter() {
                    cur = c.apply(s, cur).expect("face edges are covered");
                }
                if cur != x {
                    path.pop();
                    return false;
                }
            }
        } else if end > base && !on_path.contains(&end) {
            on_path.insert(end);
            let ok = cycles_fix(g, c, face, base, end, max_len, path, on_path, external);
            on_path.remove(&end);
            if !ok {
                path.pop();
                return false;
            }
        }
        path.pop();
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toric::{gkm_from_charpair, polytope_cube, CharPair, Preset};

    #[test]
    fn cube_faces() {
        let cp = CharPair::new(
            polytope_cube(3),
            vec![
                vec![1, -1, 0, 0, 0, 0],
                vec![0, 0, 1, -1, 0, 0],
                vec![0, 0, 0, 0, 1, -1],
            ],
        )
        .unwrap();
        let (g, c) = gkm_from_charpair(&cp).unwrap();
        let s = g.star(0);
        let f = span_face(&g, &c, 0, &s[..2]).unwrap();
        assert_eq!(f.vertices.len(), 4);
        assert!(check_external_monodromy(&g, &c, &f, 8));
        let one = span_face(&g, &c, 0, &s[..1]).unwrap();
        assert_eq!(one.vertices.len(), 2);
    }

    #[test]
    fn preset_faces_match_polytope() {
        for p in Preset::ALL {
            let cp = p.charpair();
            let poly = cp.polytope();
            let (g, c) = gkm_from_charpair(&cp).unwrap();
            for codim in 1..=poly.dim() {
                for face in poly.faces_of_codim(codim) {
                    let sub = polytope_face_subgraph(&g, poly, &face);
                    let v = *sub.vertices.iter().next().unwrap();
                    let edges: Vec<DirEdge> = face_star(&g, &sub, v).into_iter().collect();
                    if !edges.is_empty() {
                        let spanned = span_face(&g, &c, v, &edges).unwrap();
                        assert_eq!(spanned.vertices, sub.vertices, "{} {face:?}", p.name());
                    }
                    assert!(
                        check_external_monodromy(&g, &c, &sub, 8),
                        "{} {face:?}",
                        p.name()
                    );
                }
            }
        }
    }
}

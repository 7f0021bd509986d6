use super::{br_graph, r_graph, FamilyError, FlagIndex};
use crate::weightgraph::{Bijection, Connection, WeightHypergraph};

/// Star bijection along E_{from}^{to} given as pairs (far end at `from`,
/// far end at `to`).
fn bijection(
    g: &WeightHypergraph,
    from: &str,
    to: &str,
    pairs: &[(String, String)],
) -> Result<(crate::weightgraph::DirEdge, Bijection), FamilyError> {
    let e = g.dir_edge_by_label(from, to)?;
    let mut m = Bijection::new();
    for (x, y) in pairs {
        let dx = g.dir_edge_by_label(from, x)?;
        let dy = g.dir_edge_by_label(to, y)?;
        if m.insert(dx, dy).is_some() {
            return Err(FamilyError::Inconsistent(format!(
                "{} assigned twice",
                g.describe(dx)
            )));
        }
    }
    Ok((e, m))
}

/// Connection values on the edges E_{u,k}^{u,r} of BR_{i,j} with
/// a_i(u) < i − j. Empty for i ≤ j.
pub fn br_partial_connection(i: usize, j: usize) -> Result<Connection, FamilyError> {
    let g = br_graph(i, j)?;
    let mut c = Connection::new();
    if i <= j {
        return Ok(c);
    }
    let d = i - j;
    let lab = |u: &FlagIndex, k: usize| format!("{u},{k}");
    for u in FlagIndex::all(i).into_iter().filter(|u| u.top() < d) {
        for k in 0..=j {
            for r in (0..=j).filter(|&r| r != k) {
                let (kk, rr) = (k + d, r + d);
                let mut pairs = Vec::new();
                for a in (0..=j).filter(|&a| a != k && a != r) {
                    pairs.push((lab(&u, a), lab(&u, a)));
                }
                for q in (1..=i).filter(|&q| q != kk && q != rr) {
                    pairs.push((lab(&u.flip(q), k), lab(&u.flip(q), r)));
                }
                pairs.push((lab(&u, r), lab(&u, k)));
                pairs.push((lab(&u.flip(rr), k), lab(&u.flip(kk), r)));
                let (e, m) = bijection(&g, &lab(&u, k), &lab(&u, r), &pairs)?;
                c.insert(e, m);
            }
        }
    }
    Ok(c)
}

/// Connection values on the four edges around the face used against
/// R_{i,j}, i > j ≥ 2.
pub fn r_partial_connection(i: usize, j: usize) -> Result<Connection, FamilyError> {
    if !(i > j && j >= 2) {
        return Err(FamilyError::InvalidParams(
            "the R_{i,j} tables need i > j ≥ 2".into(),
        ));
    }
    let g = r_graph(i, j)?;
    let u = |ps: &[usize]| FlagIndex::ones(i, ps);
    let v = |ps: &[usize]| FlagIndex::ones(j, ps);
    let lab = |a: FlagIndex, b: FlagIndex| format!("{a},{b}");
    let d = i - j;
    let mut c = Connection::new();

    // case 1: E_{0,1_j}^{0,0}
    let mut p = Vec::new();
    for q in (1..=i).filter(|&q| q != d && q != i) {
        p.push((lab(u(&[q]), v(&[j])), lab(u(&[q]), v(&[]))));
    }
    for r in (1..=j).filter(|&r| r != j) {
        p.push((lab(u(&[]), v(&[r, j])), lab(u(&[]), v(&[r]))));
    }
    p.push((lab(u(&[]), v(&[])), lab(u(&[]), v(&[j]))));
    p.push((lab(u(&[d]), v(&[j])), lab(u(&[i]), v(&[]))));
    let (e, m) = bijection(&g, &lab(u(&[]), v(&[j])), &lab(u(&[]), v(&[])), &p)?;
    c.insert(e, m);

    // case 2: E_{0,0}^{1_{i-1},0}
    let mut p = Vec::new();
    for q in (1..=i).filter(|&q| q != d && q != i - 1 && q != i) {
        p.push((lab(u(&[q]), v(&[])), lab(u(&[q, i - 1]), v(&[]))));
    }
    for r in (1..=j).filter(|&r| r != j - 1) {
        p.push((lab(u(&[]), v(&[r])), lab(u(&[i - 1]), v(&[r]))));
    }
    p.push((lab(u(&[i - 1]), v(&[])), lab(u(&[]), v(&[]))));
    p.push((lab(u(&[]), v(&[j - 1])), lab(u(&[d, i - 1]), v(&[]))));
    p.push((lab(u(&[i]), v(&[])), lab(u(&[i - 1, i]), v(&[]))));
    let (e, m) = bijection(&g, &lab(u(&[]), v(&[])), &lab(u(&[i - 1]), v(&[])), &p)?;
    c.insert(e, m);

    // case 3: E_{1_{i-1},0}^{1_{i-1},1_j}
    let mut p = Vec::new();
    for q in (1..=i).filter(|&q| q != i - 1 && q != i) {
        p.push((lab(u(&[q, i - 1]), v(&[])), lab(u(&[q, i - 1]), v(&[j]))));
    }
    for r in (1..=j).filter(|&r| r != j - 1 && r != j) {
        p.push((lab(u(&[i - 1]), v(&[r])), lab(u(&[i - 1]), v(&[r, j]))));
    }
    p.push((lab(u(&[]), v(&[])), lab(u(&[]), v(&[j]))));
    p.push((
        lab(u(&[i - 1, i]), v(&[])),
        lab(u(&[i - 1]), v(&[j - 1, j])),
    ));
    p.push((lab(u(&[i - 1]), v(&[j])), lab(u(&[i - 1]), v(&[]))));
    let (e, m) = bijection(
        &g,
        &lab(u(&[i - 1]), v(&[])),
        &lab(u(&[i - 1]), v(&[j])),
        &p,
    )?;
    c.insert(e, m);

    // case 4: E_{1_{i-1},1_j}^{1_{i-1},1_{j-1}+1_j}
    let mut p = Vec::new();
    for q in (1..=i).filter(|&q| q != i - 1 && q != i) {
        p.push((
            lab(u(&[q, i - 1]), v(&[j])),
            lab(u(&[q, i - 1]), v(&[j - 1, j])),
        ));
    }
    for r in (1..=j).filter(|&r| r != j - 1 && r != j) {
        p.push((
            lab(u(&[i - 1]), v(&[r, j])),
            lab(u(&[i - 1]), v(&[r, j - 1, j])),
        ));
    }
    p.push((lab(u(&[]), v(&[j])), lab(u(&[]), v(&[j - 1, j]))));
    p.push((lab(u(&[i - 1]), v(&[j - 1, j])), lab(u(&[i - 1]), v(&[j]))));
    p.push((lab(u(&[i - 1]), v(&[])), lab(u(&[i - 1, i]), v(&[j - 1]))));
    let (e, m) = bijection(
        &g,
        &lab(u(&[i - 1]), v(&[j])),
        &lab(u(&[i - 1]), v(&[j - 1, j])),
        &p,
    )?;
    c.insert(e, m);

    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weightgraph::{forced_transport, is_definite_at, validate_connection};

    fn agrees(g: &WeightHypergraph, c: &Connection) {
        let rep = validate_connection(g, c);
        assert!(rep.is_empty(), "{:?}", rep.violations);
        for (&e, m) in &c.maps {
            if is_definite_at(g, e).unwrap() {
                assert_eq!(&forced_transport(g, e).unwrap(), m, "{}", g.describe(e));
            }
        }
    }

    #[test]
    fn br_tables() {
        for (i, j) in [
            (2, 0),
            (3, 0),
            (2, 1),
            (3, 1),
            (3, 2),
            (4, 2),
            (5, 2),
            (5, 3),
        ] {
            let g = br_graph(i, j).unwrap();
            let c = br_partial_connection(i, j).unwrap();
            assert_eq!(c.is_empty(), j == 0);
            agrees(&g, &c);
        }
        assert!(br_partial_connection(2, 3).unwrap().is_empty());
    }

    #[test]
    fn r_tables() {
        for (i, j) in [(3, 2), (4, 2), (4, 3), (5, 2), (5, 3), (6, 2)] {
            let g = r_graph(i, j).unwrap();
            let c = r_partial_connection(i, j).unwrap();
            assert_eq!(c.len(), 4);
            agrees(&g, &c);
        }
        assert!(r_partial_connection(2, 2).is_err());
    }

    #[test]
    fn r_case4_last_rule() {
        let g = r_graph(3, 2).unwrap();
        let c = r_partial_connection(3, 2).unwrap();
        let e = g.dir_edge_by_label("010,01", "010,11").unwrap();
        let x = g.dir_edge_by_label("010,01", "010,00").unwrap();
        let y = g.dir_edge_by_label("010,11", "011,10").unwrap();
        assert_eq!(c.apply(e, x), Some(y));
    }
}

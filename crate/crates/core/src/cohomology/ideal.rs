use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::algebra::{Elem, GradedZAlgebra};
use super::CohomologyError;
use crate::linalg::{self, Lattice, Matrix};

/// A homogeneous ideal, stored degreewise as lattices in the coordinates of
/// each graded piece.
#[derive(Clone, Debug)]
pub struct IdealZ {
    rank: usize,
    /// For each degree: the ambient basis indices and the ideal's piece.
    pieces: Vec<(Vec<usize>, Lattice)>,
}

fn restrict(e: &[i64], idx: &[usize]) -> Vec<BigInt> {
    idx.iter().map(|&i| BigInt::from(e[i])).collect()
}

impl IdealZ {
    fn from_pieces(a: &GradedZAlgebra, gens_by_degree: Vec<Matrix>) -> Self {
        let pieces = (0..=a.top_degree())
            .map(|d| {
                let idx = a.indices_of_degree(d);
                let gens = gens_by_degree.get(d).cloned().unwrap_or_default();
                let lat = Lattice::span(&gens, idx.len());
                (idx, lat)
            })
            .collect();
        IdealZ {
            rank: a.rank(),
            pieces,
        }
    }

    pub fn zero(a: &GradedZAlgebra) -> Self {
        Self::from_pieces(a, vec![])
    }

    /// Total ℤ-rank.
    pub fn rank(&self) -> usize {
        self.pieces.iter().map(|(_, l)| l.rank()).sum()
    }

    pub fn graded_ranks(&self) -> Vec<usize> {
        self.pieces.iter().map(|(_, l)| l.rank()).collect()
    }

    pub fn contains(&self, e: &Elem) -> bool {
        self.pieces
            .iter()
            .all(|(idx, lat)| lat.contains(&restrict(e, idx)))
    }

    pub fn contains_ideal(&self, other: &IdealZ) -> bool {
        self.pieces.len() == other.pieces.len()
            && self
                .pieces
                .iter()
                .zip(&other.pieces)
                .all(|((_, a), (_, b))| a.contains_lattice(b))
    }

    /// Equality by mutual inclusion of the spans.
    pub fn same_as(&self, other: &IdealZ) -> bool {
        self.contains_ideal(other) && other.contains_ideal(self)
    }

    /// Hermite ℤ-basis as algebra elements, by ascending degree.
    pub fn basis(&self) -> Vec<Elem> {
        let mut out = Vec::new();
        for (idx, lat) in &self.pieces {
            for row in &lat.basis {
                let mut e = vec![0i64; self.rank];
                for (k, &i) in idx.iter().enumerate() {
                    e[i] = row[k].to_i64().expect("coefficient fits in i64");
                }
                out.push(e);
            }
        }
        out
    }

    /// A small generating set picked greedily by ascending degree. Not
    /// claimed to be minimal.
    pub fn generating_set(&self, a: &GradedZAlgebra) -> Vec<Elem> {
        let mut chosen: Vec<Elem> = Vec::new();
        let mut current = IdealZ::zero(a);
        for b in self.basis() {
            if !current.contains(&b) {
                chosen.push(b);
                current = ideal_generated(a, &chosen).expect("basis elements are homogeneous");
            }
        }
        chosen
    }

    fn piece(&self, d: usize) -> Option<&(Vec<usize>, Lattice)> {
        self.pieces.get(d)
    }
}

/// Kernel of multiplication by a homogeneous element, degree by degree.
pub fn annihilator(a: &GradedZAlgebra, x: &Elem) -> Result<IdealZ, CohomologyError> {
    if a.is_zero(x) {
        let gens = (0..=a.top_degree())
            .map(|d| {
                let n = a.indices_of_degree(d).len();
                (0..n)
                    .map(|i| (0..n).map(|j| BigInt::from((i == j) as i64)).collect())
                    .collect()
            })
            .collect();
        return Ok(IdealZ::from_pieces(a, gens));
    }
    let dx = a
        .homogeneous_degree(x)
        .ok_or(CohomologyError::NotHomogeneous)?;
    let mut gens = Vec::new();
    for d in 0..=a.top_degree() {
        let src = a.indices_of_degree(d);
        let dst = a.indices_of_degree(d + dx);
        let m: Matrix = src
            .iter()
            .map(|&i| restrict(&a.mul(&a.basis(i), x), &dst))
            .collect();
        let ker = if dst.is_empty() {
            (0..src.len())
                .map(|i| {
                    (0..src.len())
                        .map(|j| BigInt::from((i == j) as i64))
                        .collect()
                })
                .collect()
        } else {
            linalg::left_kernel(&m, dst.len())
        };
        gens.push(ker);
    }
    Ok(IdealZ::from_pieces(a, gens))
}

/// The ideal generated by homogeneous elements.
pub fn ideal_generated(a: &GradedZAlgebra, gens: &[Elem]) -> Result<IdealZ, CohomologyError> {
    let top = a.top_degree();
    let mut by_degree: Vec<Matrix> = vec![Vec::new(); top + 1];
    for g in gens {
        if a.is_zero(g) {
            continue;
        }
        let d = a
            .homogeneous_degree(g)
            .ok_or(CohomologyError::NotHomogeneous)?;
        for b in 0..a.rank() {
            let e = d + a.degree_of(b);
            if e > top {
                continue;
            }
            let p = a.mul(g, &a.basis(b));
            if !a.is_zero(&p) {
                by_degree[e].push(restrict(&p, &a.indices_of_degree(e)));
            }
        }
    }
    Ok(IdealZ::from_pieces(a, by_degree))
}

/// A quotient ring together with the projection on basis elements.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub ring: GradedZAlgebra,
    /// `projection[i]` is the image of ambient basis element `i`.
    pub projection: Vec<Elem>,
}

impl Quotient {
    pub fn project(&self, e: &Elem) -> Elem {
        let mut out = self.ring.zero();
        for (i, &c) in e.iter().enumerate() {
            if c != 0 {
                for (o, p) in out.iter_mut().zip(&self.projection[i]) {
                    *o += c * p;
                }
            }
        }
        out
    }
}

/// Reduce a saturated lattice to rows with a ±1 pivot each, every pivot
/// column zero in all other rows. Later columns are preferred as pivots so
/// that earlier (lower) monomials survive as standard ones.
fn unit_pivot_form(lat: &Lattice) -> Option<(Matrix, Vec<usize>)> {
    let mut rows: Matrix = lat.basis.clone();
    let n = lat.dim;
    let mut out_rows: Matrix = Vec::new();
    let mut pivots = Vec::new();
    while !rows.is_empty() {
        let mut found = None;
        'search: for c in (0..n).rev() {
            for (r, row) in rows.iter().enumerate() {
                if row[c].abs().is_one() {
                    found = Some((r, c));
                    break 'search;
                }
            }
        }
        let (r, c) = found?;
        let mut row = rows.swap_remove(r);
        if row[c].is_negative() {
            for x in row.iter_mut() {
                *x = -&*x;
            }
        }
        for other in rows.iter_mut().chain(out_rows.iter_mut()) {
            let f = other[c].clone();
            if !f.is_zero() {
                for (x, y) in other.iter_mut().zip(&row) {
                    *x -= &f * y;
                }
            }
        }
        rows.retain(|r| r.iter().any(|x| !x.is_zero()));
        out_rows.push(row);
        pivots.push(c);
    }
    Some((out_rows, pivots))
}

pub fn quotient_with_projection(
    a: &GradedZAlgebra,
    ideal: &IdealZ,
) -> Result<Quotient, CohomologyError> {
    if ideal.rank != a.rank() {
        return Err(CohomologyError::Malformed(
            "ideal lives in a different ring".into(),
        ));
    }
    // per degree: standard indices and the reduction rows
    let mut standard: Vec<usize> = Vec::new();
    let mut reducers: Vec<(Vec<usize>, Matrix, Vec<usize>)> = Vec::new();
    for d in 0..=a.top_degree() {
        let (idx, lat) = ideal.piece(d).expect("ideal covers every degree");
        if lat.rank() > 0 {
            let sd = linalg::smith_diagonal(&lat.basis, idx.len());
            if !sd.iter().all(One::is_one) {
                return Err(CohomologyError::TorsionQuotient {
                    degree: d,
                    factors: sd
                        .iter()
                        .filter(|x| !x.is_one())
                        .map(|x| x.to_string())
                        .collect(),
                });
            }
        }
        let (rows, piv) = unit_pivot_form(lat).ok_or_else(|| {
            CohomologyError::Malformed(format!("no monomial complement in degree {d}"))
        })?;
        for (k, &i) in idx.iter().enumerate() {
            if !piv.contains(&k) {
                standard.push(i);
            }
        }
        reducers.push((idx.clone(), rows, piv));
    }
    standard.sort_by_key(|&i| (a.degree_of(i), i));
    let pos: std::collections::BTreeMap<usize, usize> =
        standard.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let reduce = |e: &Elem| -> Elem {
        let mut out = vec![0i64; standard.len()];
        for (idx, rows, piv) in &reducers {
            let mut v: Vec<BigInt> = restrict(e, idx);
            for (row, &c) in rows.iter().zip(piv) {
                let f = v[c].clone();
                if !f.is_zero() {
                    for (x, y) in v.iter_mut().zip(row) {
                        *x -= &f * y;
                    }
                }
            }
            for (k, &i) in idx.iter().enumerate() {
                if let Some(&p) = pos.get(&i) {
                    out[p] = v[k].to_i64().expect("coefficient fits in i64");
                }
            }
        }
        out
    };
    let names = standard.iter().map(|&i| a.names()[i].clone()).collect();
    let degrees = standard.iter().map(|&i| a.degree_of(i)).collect();
    let table = standard
        .iter()
        .map(|&i| {
            standard
                .iter()
                .map(|&j| {
                    reduce(&a.mul_basis(i, j))
                        .into_iter()
                        .enumerate()
                        .filter(|&(_, c)| c != 0)
                        .collect()
                })
                .collect()
        })
        .collect();
    let gens = a
        .generators()
        .iter()
        .map(|(n, e)| (n.clone(), reduce(e)))
        .collect();
    let ring = GradedZAlgebra::from_table(names, degrees, table, gens)?;
    let projection = (0..a.rank()).map(|i| reduce(&a.basis(i))).collect();
    Ok(Quotient { ring, projection })
}

pub fn quotient(a: &GradedZAlgebra, ideal: &IdealZ) -> Result<GradedZAlgebra, CohomologyError> {
    quotient_with_projection(a, ideal).map(|q| q.ring)
}

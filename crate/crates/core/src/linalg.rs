#![allow(clippy::needless_range_loop)]

//! Exact integer linear algebra: Hermite and Smith forms, kernels, ranks.
//!
//! Matrices are dense `Vec<Vec<BigInt>>` in row-major order. Everything here
//! works over ℤ with unimodular row operations, so lattices are never
//! replaced by their rational hulls unless a function says so.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Matrix = Vec<Vec<BigInt>>;

pub fn to_big(rows: &[Vec<i64>]) -> Matrix {
    rows.iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect()
}

pub fn to_i64(rows: &Matrix) -> Option<Vec<Vec<i64>>> {
    rows.iter()
        .map(|r| r.iter().map(|x| x.to_i64()).collect())
        .collect()
}

fn ncols(m: &Matrix, fallback: usize) -> usize {
    m.first().map_or(fallback, |r| r.len())
}

fn row_sub_mul(m: &mut Matrix, dst: usize, src: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    let (a, b) = if dst < src {
        let (lo, hi) = m.split_at_mut(src);
        (&mut lo[dst], &hi[0])
    } else {
        let (lo, hi) = m.split_at_mut(dst);
        (&mut hi[0], &lo[src])
    };
    for (x, y) in a.iter_mut().zip(b.iter()) {
        if !y.is_zero() {
            *x -= q * y;
        }
    }
}

/// Result of a row Hermite reduction `u · a = h`.
pub struct RowEchelon {
    pub h: Matrix,
    pub u: Matrix,
    /// Column of the leading entry of each nonzero row of `h`, in order.
    pub pivots: Vec<usize>,
}

/// Row-style Hermite normal form of `a` (rows × cols), tracking the
/// unimodular transform. Nonzero rows come first, leading entries are
/// positive and entries above each pivot are reduced into `[0, pivot)`.
pub fn hermite(a: &Matrix, cols: usize) -> RowEchelon {
    let rows = a.len();
    let cols = ncols(a, cols);
    let mut h = a.clone();
    let mut u: Matrix = (0..rows)
        .map(|i| {
            (0..rows)
                .map(|j| {
                    if i == j {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        loop {
            // smallest nonzero |entry| at or below r becomes the pivot
            let mut best: Option<usize> = None;
            for i in r..rows {
                if !h[i][c].is_zero() && best.is_none_or(|b| h[i][c].abs() < h[b][c].abs()) {
                    best = Some(i);
                }
            }
            let Some(p) = best else { break };
            h.swap(r, p);
            u.swap(r, p);
            let mut clean = true;
            for i in r + 1..rows {
                if h[i][c].is_zero() {
                    continue;
                }
                let q = h[i][c].div_floor(&h[r][c]);
                row_sub_mul(&mut h, i, r, &q);
                row_sub_mul(&mut u, i, r, &q);
                if !h[i][c].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if h[r][c].is_zero() {
            continue;
        }
        if h[r][c].is_negative() {
            for x in h[r].iter_mut() {
                *x = -x.clone();
            }
            for x in u[r].iter_mut() {
                *x = -x.clone();
            }
        }
        for i in 0..r {
            let q = h[i][c].div_floor(&h[r][c]);
            row_sub_mul(&mut h, i, r, &q);
            row_sub_mul(&mut u, i, r, &q);
        }
        pivots.push(c);
        r += 1;
    }
    RowEchelon { h, u, pivots }
}

/// Hermite basis of the row lattice of `a` (zero rows dropped).
pub fn row_lattice_basis(a: &Matrix, cols: usize) -> Matrix {
    let e = hermite(a, cols);
    e.h.into_iter().take(e.pivots.len()).collect()
}

/// ℤ-basis of the left kernel `{x : x·a = 0}`.
pub fn left_kernel(a: &Matrix, cols: usize) -> Matrix {
    let e = hermite(a, cols);
    let rank = e.pivots.len();
    let basis: Matrix = e.u.into_iter().skip(rank).collect();
    // tidy the basis; the lattice is unchanged
    let n = a.len();
    row_lattice_basis(&basis, n)
}

/// ℤ-basis of the right kernel `{x : a·x = 0}`.
pub fn right_kernel(a: &Matrix, cols: usize) -> Matrix {
    left_kernel(&transpose(a, cols), a.len())
}

pub fn transpose(a: &Matrix, cols: usize) -> Matrix {
    let cols = ncols(a, cols);
    (0..cols)
        .map(|j| a.iter().map(|r| r[j].clone()).collect())
        .collect()
}

pub fn rank(a: &Matrix) -> usize {
    hermite(a, 0).pivots.len()
}

pub fn rank_i64(rows: &[Vec<i64>]) -> usize {
    rank(&to_big(rows))
}

/// Reduce `v` against a Hermite basis. Returns the residue; `v` lies in the
/// lattice iff the residue is zero.
pub fn reduce_by(basis: &Matrix, pivots: &[usize], v: &[BigInt]) -> Vec<BigInt> {
    let mut v = v.to_vec();
    for (row, &c) in basis.iter().zip(pivots) {
        if v[c].is_zero() {
            continue;
        }
        let q = v[c].div_floor(&row[c]);
        if !q.is_zero() {
            for (x, y) in v.iter_mut().zip(row) {
                *x -= &q * y;
            }
        }
    }
    v
}

/// A lattice in ℤ^n kept in Hermite form, for membership and inclusion tests.
#[derive(Clone, Debug)]
pub struct Lattice {
    pub dim: usize,
    pub basis: Matrix,
    pub pivots: Vec<usize>,
}

impl Lattice {
    pub fn span(gens: &Matrix, dim: usize) -> Self {
        let e = hermite(gens, dim);
        let k = e.pivots.len();
        Lattice {
            dim,
            basis: e.h.into_iter().take(k).collect(),
            pivots: e.pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        reduce_by(&self.basis, &self.pivots, v)
            .iter()
            .all(Zero::is_zero)
    }

    pub fn contains_lattice(&self, other: &Lattice) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    /// Equal Hermite forms are equal lattices.
    pub fn same_as(&self, other: &Lattice) -> bool {
        self.dim == other.dim && self.basis == other.basis
    }
}

/// Diagonal of the Smith normal form (nonzero invariant factors only).
pub fn smith_diagonal(a: &Matrix, cols: usize) -> Vec<BigInt> {
    let mut m = a.clone();
    let rows = m.len();
    let cols = ncols(&m, cols);
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // find any nonzero entry in the trailing block
        let mut pos = None;
        'find: for i in t..rows {
            for j in t..cols {
                if !m[i][j].is_zero() {
                    pos = Some((i, j));
                    break 'find;
                }
            }
        }
        let Some((pi, pj)) = pos else { break };
        m.swap(t, pi);
        for r in m.iter_mut() {
            r.swap(t, pj);
        }
        loop {
            // move the smallest entry of the block to (t, t)
            let mut best = (t, t);
            for i in t..rows {
                for j in t..cols {
                    if !m[i][j].is_zero()
                        && (m[best.0][best.1].is_zero() || m[i][j].abs() < m[best.0][best.1].abs())
                    {
                        best = (i, j);
                    }
                }
            }
            m.swap(t, best.0);
            for r in m.iter_mut() {
                r.swap(t, best.1);
            }
            let p = m[t][t].clone();
            let mut done = true;
            for i in t + 1..rows {
                let q = m[i][t].div_floor(&p);
                row_sub_mul(&mut m, i, t, &q);
                if !m[i][t].is_zero() {
                    done = false;
                }
            }
            for j in t + 1..cols {
                let q = m[t][j].div_floor(&p);
                if !q.is_zero() {
                    for r in m.iter_mut() {
                        let s = r[t].clone();
                        r[j] -= &q * s;
                    }
                }
                if !m[t][j].is_zero() {
                    done = false;
                }
            }
            if !done {
                continue;
            }
            // divisibility condition on the remaining block
            let mut bad = None;
            'div: for i in t + 1..rows {
                for j in t + 1..cols {
                    if !(&m[i][j] % &p).is_zero() {
                        bad = Some(i);
                        break 'div;
                    }
                }
            }
            match bad {
                Some(i) => {
                    for j in t..cols {
                        let s = m[i][j].clone();
                        m[t][j] += s;
                    }
                }
                None => break,
            }
        }
        diag.push(m[t][t].abs());
        t += 1;
    }
    diag
}

/// True iff ℤ^cols / rowspan(a) is torsion free.
pub fn is_saturated(a: &Matrix, cols: usize) -> bool {
    smith_diagonal(a, cols).iter().all(One::is_one)
}

pub fn det_i64(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    let mut a: Vec<Vec<i128>> = m
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    // Bareiss fraction-free elimination
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&i| a[i][k] != 0) else {
                return 0;
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    if n == 0 {
        1
    } else {
        sign * a[n - 1][n - 1]
    }
}

/// Inverse of a unimodular integer matrix, or `None` when `|det| != 1`.
pub fn unimodular_inverse(m: &[Vec<i64>]) -> Option<Vec<Vec<i64>>> {
    let n = m.len();
    let d = det_i64(m);
    if d.abs() != 1 {
        return None;
    }
    let inv = rational_inverse(&to_big(m))?;
    inv.iter()
        .map(|r| {
            r.iter()
                .map(|x| {
                    if x.is_integer() {
                        x.to_integer().to_i64()
                    } else {
                        None
                    }
                })
                .collect::<Option<Vec<i64>>>()
        })
        .collect::<Option<Vec<_>>>()
        .filter(|r| r.len() == n)
}

pub fn rational_inverse(m: &Matrix) -> Option<Vec<Vec<BigRational>>> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row: Vec<BigRational> = r
                .iter()
                .map(|x| BigRational::from_integer(x.clone()))
                .collect();
            row.extend((0..n).map(|j| {
                if i == j {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero())?;
        a.swap(c, p);
        let inv = a[c][c].recip();
        for x in a[c].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..n {
            if i != c && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..2 * n {
                    let s = &f * &a[c][j];
                    a[i][j] -= s;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Solve `x · a = b` over ℤ. `a` is rows × cols, `b` has length cols.
pub fn solve_left(a: &Matrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    let cols = b.len();
    let e = hermite(a, cols);
    let mut residue = b.to_vec();
    let mut coeffs = vec![BigInt::zero(); e.pivots.len()];
    for (k, &c) in e.pivots.iter().enumerate() {
        let p = &e.h[k][c];
        if residue[c].is_zero() {
            continue;
        }
        if !(&residue[c] % p).is_zero() {
            return None;
        }
        let q = &residue[c] / p;
        for (x, y) in residue.iter_mut().zip(&e.h[k]) {
            *x -= &q * y;
        }
        coeffs[k] = q;
    }
    if !residue.iter().all(Zero::is_zero) {
        return None;
    }
    // x = coeffs · U restricted to the first rank rows
    let n = a.len();
    let mut x = vec![BigInt::zero(); n];
    for (k, q) in coeffs.iter().enumerate() {
        if q.is_zero() {
            continue;
        }
        for (xi, ui) in x.iter_mut().zip(&e.u[k]) {
            *xi += q * ui;
        }
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(rows: &[&[i64]]) -> Matrix {
        to_big(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    #[test]
    fn hermite_of_small_matrix() {
        let a = big(&[&[2, 4], &[3, 5]]);
        let e = hermite(&a, 2);
        assert_eq!(e.pivots, vec![0, 1]);
        assert_eq!(to_i64(&e.h).unwrap(), vec![vec![1, 1], vec![0, 2]]);
        // u · a = h
        for i in 0..2 {
            for j in 0..2 {
                let s: BigInt = (0..2).map(|k| &e.u[i][k] * &a[k][j]).sum();
                assert_eq!(s, e.h[i][j]);
            }
        }
    }

    #[test]
    fn kernel_and_smith() {
        let a = big(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        let k = left_kernel(&a, 3);
        assert_eq!(k.len(), 1);
        assert_eq!(to_i64(&k).unwrap(), vec![vec![2, -1, 0]]);
        let d = smith_diagonal(&big(&[&[2, 0], &[0, 3]]), 2);
        assert_eq!(d, vec![BigInt::from(1), BigInt::from(6)]);
        assert!(!is_saturated(&big(&[&[2, 0]]), 2));
        assert!(is_saturated(&big(&[&[2, 1]]), 2));
    }

    #[test]
    fn determinant_and_inverse() {
        let m = vec![vec![1, -1, 0], vec![0, 1, 1], vec![0, -2, -1]];
        assert_eq!(det_i64(&m), 1);
        let inv = unimodular_inverse(&m).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let s: i64 = (0..3).map(|k| m[i][k] * inv[k][j]).sum();
                assert_eq!(s, i64::from(i == j));
            }
        }
        assert!(unimodular_inverse(&[vec![2, 0], vec![0, 1]]).is_none());
    }

    #[test]
    fn solve_left_integral() {
        let a = big(&[&[2, 0], &[0, 3]]);
        let x = solve_left(&a, &[BigInt::from(4), BigInt::from(9)]).unwrap();
        assert_eq!(x, vec![BigInt::from(2), BigInt::from(3)]);
        assert!(solve_left(&a, &[BigInt::from(1), BigInt::from(0)]).is_none());
    }
}

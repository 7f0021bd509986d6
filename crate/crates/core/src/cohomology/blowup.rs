use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::algebra::{ring_bf_var, ring_projective_var, ring_tensor, Elem, GradedZAlgebra};
use super::ideal::{ideal_generated, quotient};
use super::CohomologyError;
use crate::linalg::{self, Matrix};

/// Input of the blow-up formula: ambient ring, center ring, restriction
/// (generator images), Chern classes c_1..c_{k-1} of the normal bundle,
/// the class ω of the center in the ambient ring and the codimension k.
#[derive(Clone, Debug)]
pub struct BlowupData {
    pub ambient: GradedZAlgebra,
    pub center: GradedZAlgebra,
    pub restriction: Vec<(String, Elem)>,
    pub chern: Vec<Elem>,
    pub omega: Elem,
    pub codim: usize,
    /// Name of the new degree-one class.
    pub var: String,
}

fn check_degree(a: &GradedZAlgebra, e: &Elem, d: usize, what: &str) -> Result<(), CohomologyError> {
    match a.homogeneous_degree(e) {
        None if a.is_zero(e) => Ok(()),
        Some(x) if x == d => Ok(()),
        _ => Err(CohomologyError::DegreeMismatch(format!(
            "{what} should have degree {d}"
        ))),
    }
}

/// Images of all ambient basis elements, after checking that the generator
/// images define a graded ring homomorphism.
fn ring_map(
    src: &GradedZAlgebra,
    dst: &GradedZAlgebra,
    images: &[(String, Elem)],
) -> Result<Vec<Elem>, CohomologyError> {
    for (n, e) in images {
        let g = src.gen(n)?;
        let d = src
            .homogeneous_degree(&g)
            .ok_or(CohomologyError::NotHomogeneous)?;
        check_degree(dst, e, d, &format!("image of {n}"))?;
    }
    let phi = src.map_basis(dst, images)?;
    if phi[src.unit_index()] != dst.one() {
        return Err(CohomologyError::NotRingMap("1 is not sent to 1".into()));
    }
    for i in 0..src.rank() {
        check_degree(
            dst,
            &phi[i],
            src.degree_of(i),
            &format!("image of {}", src.names()[i]),
        )?;
        for j in i..src.rank() {
            let mut lhs = dst.zero();
            for &(k, c) in src.table_entry(i, j) {
                lhs = dst.add(&lhs, &dst.scale(&phi[k], c));
            }
            if lhs != dst.mul(&phi[i], &phi[j]) {
                return Err(CohomologyError::NotRingMap(format!(
                    "product {}·{} is not preserved",
                    src.names()[i],
                    src.names()[j]
                )));
            }
        }
    }
    Ok(phi)
}

/// Checks that the generator images define a degree-preserving ring
/// isomorphism `src → dst`.
pub fn check_ring_isomorphism(
    src: &GradedZAlgebra,
    dst: &GradedZAlgebra,
    images: &[(String, Elem)],
) -> Result<(), CohomologyError> {
    if src.graded_ranks() != dst.graded_ranks() {
        return Err(CohomologyError::NotRingMap("graded ranks differ".into()));
    }
    let phi = ring_map(src, dst, images)?;
    for d in 0..=src.top_degree() {
        let si = src.indices_of_degree(d);
        let di = dst.indices_of_degree(d);
        let m: Vec<Vec<i64>> = si
            .iter()
            .map(|&i| di.iter().map(|&k| phi[i][k]).collect())
            .collect();
        if linalg::det_i64(&m).abs() != 1 {
            return Err(CohomologyError::NotRingMap(format!(
                "not bijective in degree {d}"
            )));
        }
    }
    Ok(())
}

/// H*(X) ⊕ H*(Z)·v ⊕ … ⊕ H*(Z)·v^{k-1} with x·v = ι*(x)·v and
/// v^k + c_1 v^{k-1} + … + c_{k-1} v + ω = 0.
///
/// Built as X[v]/(v^k + c̃_1 v^{k-1} + … + ω) for lifts c̃ of the Chern
/// classes, modulo ker(ι*)·v. Requires ι* to be surjective.
pub fn blowup_ring(d: &BlowupData) -> Result<GradedZAlgebra, CohomologyError> {
    let x = &d.ambient;
    let z = &d.center;
    let k = d.codim;
    if k < 2 {
        return Err(CohomologyError::InvalidParams(
            "codimension must be at least 2".into(),
        ));
    }
    if d.chern.len() != k - 1 {
        return Err(CohomologyError::DegreeMismatch(format!(
            "expected {} Chern classes",
            k - 1
        )));
    }
    for (r, c) in d.chern.iter().enumerate() {
        check_degree(z, c, r + 1, &format!("c_{}", r + 1))?;
    }
    check_degree(x, &d.omega, k, "ω")?;
    let phi = ring_map(x, z, &d.restriction)?;

    // restriction matrices per degree, kernel and lifts
    let mut kernel: Vec<Elem> = Vec::new();
    let mut lifts: Vec<Elem> = Vec::new();
    for deg in 0..=x.top_degree().max(z.top_degree()) {
        let xi = x.indices_of_degree(deg);
        let zi = z.indices_of_degree(deg);
        let m: Matrix = xi
            .iter()
            .map(|&i| zi.iter().map(|&j| BigInt::from(phi[i][j])).collect())
            .collect();
        if !zi.is_empty() {
            let img = linalg::Lattice::span(&m, zi.len());
            if img.rank() != zi.len() || !linalg::is_saturated(&img.basis, zi.len()) {
                return Err(CohomologyError::RestrictionNotSurjective(deg));
            }
        }
        let ker = if zi.is_empty() {
            (0..xi.len())
                .map(|a| {
                    (0..xi.len())
                        .map(|b| BigInt::from((a == b) as i64))
                        .collect()
                })
                .collect()
        } else {
            linalg::left_kernel(&m, zi.len())
        };
        for row in ker {
            let mut e = x.zero();
            for (t, &i) in xi.iter().enumerate() {
                e[i] = row[t].to_i64().expect("kernel entry fits");
            }
            kernel.push(e);
        }
        if deg >= 1 && deg < k {
            let c = &d.chern[deg - 1];
            let rhs: Vec<BigInt> = zi.iter().map(|&j| BigInt::from(c[j])).collect();
            let sol = linalg::solve_left(&m, &rhs)
                .ok_or(CohomologyError::RestrictionNotSurjective(deg))?;
            let mut e = x.zero();
            for (t, &i) in xi.iter().enumerate() {
                e[i] = sol[t].to_i64().expect("lift fits");
            }
            lifts.push(e);
        }
    }
    // c̃_1..c̃_{k-1}, then ω as c̃_k
    lifts.push(d.omega.clone());

    let (p, at) = extend_by_root(x, &lifts, &d.var)?;
    let vpos = |e: &Elem, m: usize| -> Elem {
        let mut out = vec![0; p.rank()];
        for (i, &c) in e.iter().enumerate() {
            out[at[i * k + m]] = c;
        }
        out
    };
    let gens: Vec<Elem> = kernel.iter().map(|a| vpos(a, 1)).collect();
    let ideal = ideal_generated(&p, &gens)?;
    let q = quotient(&p, &ideal)?;
    let expect = x.rank() + (k - 1) * z.rank();
    if q.rank() != expect {
        return Err(CohomologyError::NotAlgebra(format!(
            "blow-up ring has rank {} instead of {expect}",
            q.rank()
        )));
    }
    Ok(q)
}

/// X[v]/(v^k + c_1 v^{k-1} + … + c_k), free over X on 1, v, …, v^{k-1}.
/// Also returns the position of `x_i v^m` at index `i * k + m`.
fn extend_by_root(
    x: &GradedZAlgebra,
    c: &[Elem],
    var: &str,
) -> Result<(GradedZAlgebra, Vec<usize>), CohomologyError> {
    let k = c.len();
    let n = x.rank();
    let vname = |m: usize| match m {
        0 => "1".to_string(),
        1 => var.to_string(),
        _ => format!("{var}^{m}"),
    };
    let mut names = Vec::with_capacity(n * k);
    let mut degrees = Vec::with_capacity(n * k);
    for i in 0..n {
        for m in 0..k {
            names.push(match (x.names()[i].as_str(), m) {
                (a, 0) => a.to_string(),
                ("1", _) => vname(m),
                (a, _) => format!("{a}*{}", vname(m)),
            });
            degrees.push(x.degree_of(i) + m);
        }
    }
    let mut table = vec![vec![Vec::new(); n * k]; n * k];
    for i in 0..n {
        for j in 0..n {
            let xij = x.mul_basis(i, j);
            for m1 in 0..k {
                for m2 in 0..k {
                    // coefficients of v^0 .. v^{2k-2}, reduced from the top
                    let mut coef: Vec<Elem> = vec![x.zero(); 2 * k - 1];
                    coef[m1 + m2] = xij.clone();
                    for p in (k..2 * k - 1).rev() {
                        let a = std::mem::replace(&mut coef[p], x.zero());
                        if x.is_zero(&a) {
                            continue;
                        }
                        for (r, cr) in c.iter().enumerate() {
                            let t = x.mul(&a, cr);
                            coef[p - r - 1] = x.sub(&coef[p - r - 1], &t);
                        }
                    }
                    let entry = &mut table[i * k + m1][j * k + m2];
                    for (m, e) in coef.iter().enumerate().take(k) {
                        for (b, &v) in e.iter().enumerate() {
                            if v != 0 {
                                entry.push((b * k + m, v));
                            }
                        }
                    }
                }
            }
        }
    }
    let mut gens: Vec<(String, Elem)> = x
        .generators()
        .iter()
        .map(|(g, e)| {
            let mut out = vec![0; n * k];
            for (i, &v) in e.iter().enumerate() {
                out[i * k] = v;
            }
            (g.clone(), out)
        })
        .collect();
    let mut v = vec![0; n * k];
    v[x.unit_index() * k + 1] = 1;
    gens.push((var.to_string(), v));
    // reorder basis by degree so that graded pieces are contiguous
    let mut order: Vec<usize> = (0..n * k).collect();
    order.sort_by_key(|&t| (degrees[t], t));
    let mut inv = vec![0; n * k];
    for (new, &old) in order.iter().enumerate() {
        inv[old] = new;
    }
    let names2 = order.iter().map(|&t| names[t].clone()).collect();
    let degrees2 = order.iter().map(|&t| degrees[t]).collect();
    let table2 = order
        .iter()
        .map(|&a| {
            order
                .iter()
                .map(|&b| table[a][b].iter().map(|&(t, c)| (inv[t], c)).collect())
                .collect()
        })
        .collect();
    let gens2 = gens
        .into_iter()
        .map(|(g, e)| {
            let mut out = vec![0; n * k];
            for (t, &c) in e.iter().enumerate() {
                out[inv[t]] = c;
            }
            (g, out)
        })
        .collect();
    let r = GradedZAlgebra::from_table(names2, degrees2, table2, gens2)?;
    Ok((r, inv))
}

/// The ring of H*(BF_1 × BF_2) blown up along R_{1,1} ≅ ℙ¹, with
/// ν of total Chern class 1 + 3t and ω = (x_1 + y_1) y_2.
pub fn r22_blowup_data() -> BlowupData {
    let ambient = ring_tensor(&ring_bf_var(1, "x"), &ring_bf_var(2, "y")).expect("distinct names");
    let center = ring_projective_var(1, "t");
    let t = center.gen("t").expect("generator t");
    let restriction = ["x1", "y1", "y2"]
        .iter()
        .map(|g| (g.to_string(), t.clone()))
        .collect();
    let chern = vec![center.scale(&t, 3)];
    let omega = ambient.eval("(x1+y1)*y2").expect("valid expression");
    BlowupData {
        ambient,
        center,
        restriction,
        chern,
        omega,
        codim: 2,
        var: "v".into(),
    }
}

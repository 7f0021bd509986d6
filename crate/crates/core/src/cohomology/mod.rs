//! Integral cohomology rings of the hypersurface families as finite free
//! graded ℤ-algebras, with annihilator ideals, quotients, blow-up rings and
//! Hodge–Deligne polynomials.

mod algebra;
mod blowup;
pub mod expr;
mod hodge;
mod ideal;

pub use algebra::{
    ring_bf, ring_bf_var, ring_projective, ring_projective_var, ring_tensor, Elem, GradedZAlgebra,
};
pub use blowup::{blowup_ring, check_ring_isomorphism, r22_blowup_data, BlowupData};
pub use hodge::{
    betti_br_binomial, betti_from_hd, betti_r_binomial, hd_bf, hd_br, hd_br_recursive,
    hd_projective, hd_r, hd_r_recursive, HDPolynomial,
};
pub use ideal::{
    annihilator, ideal_generated, quotient, quotient_with_projection, IdealZ, Quotient,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CohomologyError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("not an algebra: {0}")]
    NotAlgebra(String),
    #[error("element is not homogeneous")]
    NotHomogeneous,
    #[error("quotient has torsion in degree {degree}: invariant factors {factors:?}")]
    TorsionQuotient { degree: usize, factors: Vec<String> },
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("not a ring homomorphism: {0}")]
    NotRingMap(String),
    #[error("restriction to the center is not surjective in degree {0}")]
    RestrictionNotSurjective(usize),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

/// H*(BR_{i,j}) = H*(BF_i) ⊗ ℤ[y]/(y^{j+1}) modulo Ann(x_i + y).
pub fn br_cohomology(
    i: usize,
    j: usize,
) -> Result<(GradedZAlgebra, IdealZ, GradedZAlgebra), CohomologyError> {
    if i == 0 || j == 0 {
        return Err(CohomologyError::InvalidParams(format!(
            "BR_{{{i},{j}}} needs i, j ≥ 1"
        )));
    }
    let a = ring_tensor(&ring_bf_var(i, "x"), &ring_projective_var(j, "y"))?;
    let h = a.eval(&format!("x{i} + y"))?;
    let ann = annihilator(&a, &h)?;
    let q = quotient(&a, &ann)?;
    Ok((a, ann, q))
}

/// H*(R_{i,j}) = H*(BF_i) ⊗ H*(BF_j) modulo Ann(x_i + y_j).
pub fn r_cohomology(
    i: usize,
    j: usize,
) -> Result<(GradedZAlgebra, IdealZ, GradedZAlgebra), CohomologyError> {
    if i == 0 || j == 0 {
        return Err(CohomologyError::InvalidParams(format!(
            "R_{{{i},{j}}} needs i, j ≥ 1"
        )));
    }
    let a = ring_tensor(&ring_bf_var(i, "x"), &ring_bf_var(j, "y"))?;
    let h = a.eval(&format!("x{i} + y{j}"))?;
    let ann = annihilator(&a, &h)?;
    let q = quotient(&a, &ann)?;
    Ok((a, ann, q))
}

use std::fmt;

use serde::Serialize;

use super::CohomologyError;

/// Hodge–Deligne polynomial in t = uv. For the spaces handled here the
/// coefficient of t^k is the Betti number b^{2k}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HDPolynomial {
    pub coeffs: Vec<i64>,
}

impl HDPolynomial {
    pub fn new(mut coeffs: Vec<i64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0);
        }
        HDPolynomial { coeffs }
    }

    pub fn one() -> Self {
        Self::new(vec![1])
    }

    /// (1 + t)^n
    pub fn one_plus_t_pow(n: usize) -> Self {
        let mut c = vec![1i64];
        for _ in 0..n {
            let mut d = vec![0; c.len() + 1];
            for (k, &x) in c.iter().enumerate() {
                d[k] += x;
                d[k + 1] += x;
            }
            c = d;
        }
        Self::new(c)
    }

    /// 1 + t + … + t^n
    pub fn geometric(n: usize) -> Self {
        Self::new(vec![1; n + 1])
    }

    /// t^s · self
    pub fn shift(&self, s: usize) -> Self {
        let mut c = vec![0; s];
        c.extend_from_slice(&self.coeffs);
        Self::new(c)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut c = vec![0; self.coeffs.len() + o.coeffs.len() - 1];
        for (a, &x) in self.coeffs.iter().enumerate() {
            for (b, &y) in o.coeffs.iter().enumerate() {
                c[a + b] += x * y;
            }
        }
        Self::new(c)
    }

    pub fn coeff(&self, k: usize) -> i64 {
        self.coeffs.get(k).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, t: i64) -> i64 {
        self.coeffs.iter().rev().fold(0, |acc, &c| acc * t + c)
    }

    pub fn is_palindromic(&self) -> bool {
        self.coeffs.iter().eq(self.coeffs.iter().rev())
    }

    pub fn is_nonnegative(&self) -> bool {
        self.coeffs.iter().all(|&c| c >= 0)
    }
}

impl fmt::Display for HDPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (k, c) {
                (0, _) => write!(f, "{c}")?,
                (1, 1) => write!(f, "t")?,
                (1, _) => write!(f, "{c}t")?,
                (_, 1) => write!(f, "t^{k}")?,
                _ => write!(f, "{c}t^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Betti numbers b^0, b^2, …, b^{2n}; odd Betti numbers vanish.
pub fn betti_from_hd(p: &HDPolynomial) -> Vec<i64> {
    p.coeffs.clone()
}

pub fn hd_projective(n: usize) -> HDPolynomial {
    HDPolynomial::geometric(n)
}

/// BF_n is an iterated ℙ¹-bundle.
pub fn hd_bf(n: usize) -> HDPolynomial {
    (0..n).fold(HDPolynomial::one(), |acc, _| {
        acc.mul(&HDPolynomial::one_plus_t_pow(1))
    })
}

/// Closed form for e(BR_{i,j}).
pub fn hd_br(i: usize, j: usize) -> Result<HDPolynomial, CohomologyError> {
    if i == 0 {
        return Err(CohomologyError::InvalidParams(
            "BR_{i,j} needs i ≥ 1".into(),
        ));
    }
    if i + j < 2 {
        return Err(CohomologyError::InvalidParams("BR_{1,0} is a point".into()));
    }
    if j == 0 {
        return Ok(HDPolynomial::one_plus_t_pow(i - 1));
    }
    let base = HDPolynomial::one_plus_t_pow(i).mul(&HDPolynomial::geometric(j - 1));
    if i <= j {
        return Ok(base);
    }
    Ok(base.add(&HDPolynomial::one_plus_t_pow(i - j - 1).shift(j)))
}

/// Closed form for e(R_{i,j}).
pub fn hd_r(i: usize, j: usize) -> Result<HDPolynomial, CohomologyError> {
    if i + j < 2 {
        return Err(CohomologyError::InvalidParams(
            "R_{i,j} needs i + j ≥ 2".into(),
        ));
    }
    let (i, j) = if i < j { (j, i) } else { (i, j) };
    if j == 0 {
        return Ok(HDPolynomial::one_plus_t_pow(i - 1));
    }
    let mut p = HDPolynomial::new(vec![0]);
    for m in 0..j {
        p = p.add(&HDPolynomial::one_plus_t_pow(i + j - 1 - 2 * m).shift(m));
    }
    if i != j {
        p = p.add(&HDPolynomial::one_plus_t_pow(i + j - 2 * j - 1).shift(j));
    }
    Ok(p)
}

/// e(Bl_Z X) = e(X) + (t + … + t^{k-1}) e(Z), with k read off the
/// dimension difference.
fn blowup_hd(x: &HDPolynomial, z: &HDPolynomial) -> HDPolynomial {
    let k = x.degree() - z.degree();
    let mut p = x.clone();
    for s in 1..k {
        p = p.add(&z.shift(s));
    }
    p
}

/// e(BR_{i,j}) through products and blow-ups along smaller members of the
/// family.
pub fn hd_br_recursive(i: usize, j: usize) -> Result<HDPolynomial, CohomologyError> {
    if i == 0 {
        return Err(CohomologyError::InvalidParams(
            "BR_{i,j} needs i ≥ 1".into(),
        ));
    }
    if i + j < 2 {
        return Err(CohomologyError::InvalidParams("BR_{1,0} is a point".into()));
    }
    if j == 0 {
        return Ok(hd_bf(i - 1));
    }
    if i <= j {
        return Ok(hd_bf(i).mul(&hd_projective(j - 1)));
    }
    if j == 1 {
        // BF_{i-1} × ℙ¹ blown up along BF_{i-2}
        return Ok(blowup_hd(
            &hd_bf(i - 1).mul(&hd_projective(1)),
            &hd_bf(i - 2),
        ));
    }
    Ok(blowup_hd(
        &hd_bf(i - 1).mul(&hd_projective(j)),
        &hd_br_recursive(i - 1, j - 1)?,
    ))
}

/// e(R_{i,j}) through blow-ups along smaller members of the family.
pub fn hd_r_recursive(i: usize, j: usize) -> Result<HDPolynomial, CohomologyError> {
    if i + j < 2 {
        return Err(CohomologyError::InvalidParams(
            "R_{i,j} needs i + j ≥ 2".into(),
        ));
    }
    let (i, j) = if i < j { (j, i) } else { (i, j) };
    match (i, j) {
        (_, 0) => Ok(hd_bf(i - 1)),
        (_, 1) => hd_br_recursive(i, 1),
        _ => Ok(blowup_hd(&hd_bf(i + j - 1), &hd_r_recursive(i - 1, j - 1)?)),
    }
}

fn binom(n: i64, k: i64) -> i64 {
    if k < 0 || n < 0 || k > n {
        return 0;
    }
    (0..k).fold(1i64, |acc, t| acc * (n - t) / (t + 1))
}

/// b^{2k}(BR_{i,j}) for i > j > 0 as a sum of binomial coefficients.
pub fn betti_br_binomial(i: usize, j: usize) -> Result<Vec<i64>, CohomologyError> {
    if !(i > j && j > 0) {
        return Err(CohomologyError::InvalidParams(
            "binomial formula needs i > j > 0".into(),
        ));
    }
    let (i, j) = (i as i64, j as i64);
    Ok((0..i + j)
        .map(|k| (0..j).map(|s| binom(i, k - s)).sum::<i64>() + binom(i - j - 1, k - j))
        .collect())
}

/// b^{2k}(R_{i,j}) for i, j > 0 as a sum of binomial coefficients.
pub fn betti_r_binomial(i: usize, j: usize) -> Result<Vec<i64>, CohomologyError> {
    if i == 0 || j == 0 || (i == 1 && j == 1) {
        return Err(CohomologyError::InvalidParams(
            "binomial formula needs i, j > 0, not both 1".into(),
        ));
    }
    let (i, j) = (i as i64, j as i64);
    let m = i.min(j);
    Ok((0..i + j)
        .map(|k| {
            let main: i64 = (0..m).map(|s| binom(i + j - 1 - 2 * s, k - s)).sum();
            if i == j {
                main
            } else {
                main + binom(i + j - 2 * m - 1, k - m)
            }
        })
        .collect())
}

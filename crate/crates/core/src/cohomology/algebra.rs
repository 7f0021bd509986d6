use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::expr::{self, Expr};
use super::CohomologyError;

/// Dense coordinates in the algebra's basis.
pub type Elem = Vec<i64>;

/// A finite free graded commutative ℤ-algebra given by structure constants.
/// Degrees are halved: a class in H^{2k} has degree k.
#[derive(Clone, Debug)]
pub struct GradedZAlgebra {
    names: Vec<String>,
    degrees: Vec<usize>,
    table: Vec<Vec<Vec<(usize, i64)>>>,
    gens: Vec<(String, Elem)>,
    unit: usize,
}

#[derive(Serialize)]
struct AlgebraJson<'a> {
    basis: &'a [String],
    degrees: &'a [usize],
    generators: Vec<&'a str>,
    /// (i, j, k, c): basis_i · basis_j has coefficient c on basis_k
    table: Vec<(usize, usize, usize, i64)>,
}

impl GradedZAlgebra {
    pub fn from_table(
        names: Vec<String>,
        degrees: Vec<usize>,
        table: Vec<Vec<Vec<(usize, i64)>>>,
        gens: Vec<(String, Elem)>,
    ) -> Result<Self, CohomologyError> {
        let n = names.len();
        if degrees.len() != n || table.len() != n || table.iter().any(|r| r.len() != n) {
            return Err(CohomologyError::Malformed("table shape".into()));
        }
        let units: Vec<usize> = (0..n).filter(|&i| degrees[i] == 0).collect();
        let [unit] = units.as_slice() else {
            return Err(CohomologyError::Malformed(
                "degree zero part must have rank 1".into(),
            ));
        };
        let a = GradedZAlgebra {
            names,
            degrees,
            table,
            gens,
            unit: *unit,
        };
        a.check_cheap()?;
        Ok(a)
    }

    fn check_cheap(&self) -> Result<(), CohomologyError> {
        let n = self.rank();
        for i in 0..n {
            let mut ui = self.basis(self.unit);
            ui = self.mul(&ui, &self.basis(i));
            if ui != self.basis(i) {
                return Err(CohomologyError::NotAlgebra(format!(
                    "unit law fails on {}",
                    self.names[i]
                )));
            }
            for j in 0..n {
                for &(k, c) in &self.table[i][j] {
                    if c != 0 && self.degrees[k] != self.degrees[i] + self.degrees[j] {
                        return Err(CohomologyError::NotAlgebra("product not graded".into()));
                    }
                }
                if self.mul_basis(i, j) != self.mul_basis(j, i) {
                    return Err(CohomologyError::NotAlgebra(format!(
                        "{}·{} is not commutative",
                        self.names[i], self.names[j]
                    )));
                }
            }
        }
        Ok(())
    }

    /// Associativity on all basis triples up to rank 256, on 1000 seeded
    /// random triples above that.
    pub fn verify_associative(&self) -> Result<(), CohomologyError> {
        let n = self.rank();
        let check = |i: usize, j: usize, k: usize| -> Result<(), CohomologyError> {
            let ij = self.mul_basis(i, j);
            let jk = self.mul_basis(j, k);
            if self.mul(&ij, &self.basis(k)) != self.mul(&self.basis(i), &jk) {
                return Err(CohomologyError::NotAlgebra(format!(
                    "associativity fails on ({}, {}, {})",
                    self.names[i], self.names[j], self.names[k]
                )));
            }
            Ok(())
        };
        if n <= 256 {
            for i in 0..n {
                for j in 0..n {
                    if self.table[i][j].is_empty() {
                        continue;
                    }
                    for k in 0..n {
                        check(i, j, k)?;
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            for _ in 0..1000 {
                check(
                    rng.gen_range(0..n),
                    rng.gen_range(0..n),
                    rng.gen_range(0..n),
                )?;
            }
        }
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn degree_of(&self, i: usize) -> usize {
        self.degrees[i]
    }

    pub fn top_degree(&self) -> usize {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    /// Ranks of the graded pieces, indexed by (halved) degree.
    pub fn graded_ranks(&self) -> Vec<usize> {
        let mut r = vec![0; self.top_degree() + 1];
        for &d in &self.degrees {
            r[d] += 1;
        }
        r
    }

    pub fn indices_of_degree(&self, d: usize) -> Vec<usize> {
        (0..self.rank()).filter(|&i| self.degrees[i] == d).collect()
    }

    pub fn unit_index(&self) -> usize {
        self.unit
    }

    pub fn generators(&self) -> &[(String, Elem)] {
        &self.gens
    }

    pub fn zero(&self) -> Elem {
        vec![0; self.rank()]
    }

    pub fn one(&self) -> Elem {
        self.basis(self.unit)
    }

    pub fn basis(&self, i: usize) -> Elem {
        let mut e = self.zero();
        e[i] = 1;
        e
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn gen(&self, name: &str) -> Result<Elem, CohomologyError> {
        self.gens
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, e)| e.clone())
            .ok_or_else(|| CohomologyError::UnknownGenerator(name.to_string()))
    }

    pub(crate) fn table_entry(&self, i: usize, j: usize) -> &[(usize, i64)] {
        &self.table[i][j]
    }

    pub fn mul_basis(&self, i: usize, j: usize) -> Elem {
        let mut out = self.zero();
        for &(k, c) in &self.table[i][j] {
            out[k] += c;
        }
        out
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        let mut out = self.zero();
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                if y == 0 {
                    continue;
                }
                for &(k, c) in &self.table[i][j] {
                    out[k] += x * y * c;
                }
            }
        }
        out
    }

    pub fn pow(&self, a: &Elem, n: u32) -> Elem {
        let mut r = self.one();
        for _ in 0..n {
            r = self.mul(&r, a);
        }
        r
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        a.iter().zip(b).map(|(x, y)| x - y).collect()
    }

    pub fn scale(&self, a: &Elem, c: i64) -> Elem {
        a.iter().map(|x| c * x).collect()
    }

    pub fn is_zero(&self, a: &Elem) -> bool {
        a.iter().all(|&x| x == 0)
    }

    /// Degree of a nonzero homogeneous element.
    pub fn homogeneous_degree(&self, a: &Elem) -> Option<usize> {
        let mut d = None;
        for (i, &x) in a.iter().enumerate() {
            if x != 0 {
                match d {
                    None => d = Some(self.degrees[i]),
                    Some(e) if e != self.degrees[i] => return None,
                    _ => {}
                }
            }
        }
        d
    }

    /// Homogeneous components, keyed by degree.
    pub fn components(&self, a: &Elem) -> BTreeMap<usize, Elem> {
        let mut out: BTreeMap<usize, Elem> = BTreeMap::new();
        for (i, &x) in a.iter().enumerate() {
            if x != 0 {
                out.entry(self.degrees[i]).or_insert_with(|| self.zero())[i] = x;
            }
        }
        out
    }

    pub fn eval_expr(&self, e: &Expr) -> Result<Elem, CohomologyError> {
        self.eval_with(e, &|name| self.gen(name))
    }

    pub(crate) fn eval_with(
        &self,
        e: &Expr,
        var: &dyn Fn(&str) -> Result<Elem, CohomologyError>,
    ) -> Result<Elem, CohomologyError> {
        Ok(match e {
            Expr::Int(c) => self.scale(&self.one(), *c),
            Expr::Var(v) => var(v)?,
            Expr::Add(a, b) => self.add(&self.eval_with(a, var)?, &self.eval_with(b, var)?),
            Expr::Sub(a, b) => self.sub(&self.eval_with(a, var)?, &self.eval_with(b, var)?),
            Expr::Mul(a, b) => self.mul(&self.eval_with(a, var)?, &self.eval_with(b, var)?),
            Expr::Neg(a) => self.scale(&self.eval_with(a, var)?, -1),
            Expr::Pow(a, n) => self.pow(&self.eval_with(a, var)?, *n),
        })
    }

    /// Evaluate a polynomial in the generators, e.g. `"x2*y^2 - x3*y^2"`.
    pub fn eval(&self, s: &str) -> Result<Elem, CohomologyError> {
        self.eval_expr(&expr::parse(s)?)
    }

    pub fn format(&self, a: &Elem) -> String {
        let mut out = String::new();
        for (i, &c) in a.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let name = &self.names[i];
            let mag = c.unsigned_abs();
            if out.is_empty() {
                if c < 0 {
                    out.push('-');
                }
            } else {
                out.push_str(if c < 0 { " - " } else { " + " });
            }
            if name == "1" {
                out.push_str(&mag.to_string());
            } else if mag == 1 {
                out.push_str(name);
            } else {
                out.push_str(&format!("{mag}*{name}"));
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut table = Vec::new();
        for i in 0..self.rank() {
            for j in 0..self.rank() {
                for &(k, c) in &self.table[i][j] {
                    if c != 0 {
                        table.push((i, j, k, c));
                    }
                }
            }
        }
        let j = AlgebraJson {
            basis: &self.names,
            degrees: &self.degrees,
            generators: self.gens.iter().map(|(n, _)| n.as_str()).collect(),
            table,
        };
        serde_json::to_value(j).expect("algebra serializes")
    }

    /// Image of every basis element under the ring map determined by the
    /// generator images. Basis names are read as monomials in generators.
    pub fn map_basis(
        &self,
        target: &GradedZAlgebra,
        images: &[(String, Elem)],
    ) -> Result<Vec<Elem>, CohomologyError> {
        let lookup = |name: &str| -> Result<Elem, CohomologyError> {
            images
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, e)| e.clone())
                .ok_or_else(|| CohomologyError::UnknownGenerator(name.to_string()))
        };
        self.names
            .iter()
            .map(|name| target.eval_with(&expr::parse(name)?, &lookup))
            .collect()
    }
}

fn monomial_name(parts: &[(String, usize)]) -> String {
    let ps: Vec<String> = parts
        .iter()
        .filter(|(_, e)| *e > 0)
        .map(|(v, e)| {
            if *e == 1 {
                v.clone()
            } else {
                format!("{v}^{e}")
            }
        })
        .collect();
    if ps.is_empty() {
        "1".into()
    } else {
        ps.join("*")
    }
}

/// ℤ[y]/(y^{n+1}).
pub fn ring_projective_var(n: usize, var: &str) -> GradedZAlgebra {
    let names: Vec<String> = (0..=n)
        .map(|a| monomial_name(&[(var.to_string(), a)]))
        .collect();
    let degrees: Vec<usize> = (0..=n).collect();
    let table = (0..=n)
        .map(|a| {
            (0..=n)
                .map(|b| if a + b <= n { vec![(a + b, 1)] } else { vec![] })
                .collect()
        })
        .collect();
    let gens = if n >= 1 {
        let mut e = vec![0; n + 1];
        e[1] = 1;
        vec![(var.to_string(), e)]
    } else {
        vec![]
    };
    GradedZAlgebra::from_table(names, degrees, table, gens).expect("projective ring is valid")
}

pub fn ring_projective(n: usize) -> GradedZAlgebra {
    ring_projective_var(n, "y")
}

/// ℤ[x_1..x_n]/(x_q² − x_q x_{q−1}) with x_0 = 0, on its square-free
/// monomial basis. Products are normalised by the terminating rewriting
/// x_q² → x_q x_{q−1}.
pub fn ring_bf_var(n: usize, var: &str) -> GradedZAlgebra {
    let mut subsets: Vec<u32> = (0..(1u32 << n)).collect();
    subsets.sort_by_key(|&s| {
        (
            s.count_ones(),
            (0..n).map(|q| (s >> q) & 1 == 0).collect::<Vec<_>>(),
        )
    });
    let pos: BTreeMap<u32, usize> = subsets.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let names: Vec<String> = subsets
        .iter()
        .map(|&s| {
            let parts: Vec<(String, usize)> = (0..n)
                .filter(|q| (s >> q) & 1 == 1)
                .map(|q| (format!("{var}{}", q + 1), 1))
                .collect();
            monomial_name(&parts)
        })
        .collect();
    let degrees: Vec<usize> = subsets.iter().map(|s| s.count_ones() as usize).collect();
    let normal = |a: u32, b: u32| -> Option<u32> {
        let mut e: Vec<u32> = (0..n).map(|q| ((a >> q) & 1) + ((b >> q) & 1)).collect();
        while let Some(q) = (0..n).rev().find(|&q| e[q] >= 2) {
            if q == 0 {
                return None;
            }
            e[q] -= 1;
            e[q - 1] += 1;
        }
        Some((0..n).fold(0u32, |acc, q| acc | (e[q] << q)))
    };
    let table = subsets
        .iter()
        .map(|&a| {
            subsets
                .iter()
                .map(|&b| normal(a, b).map_or(vec![], |m| vec![(pos[&m], 1)]))
                .collect()
        })
        .collect();
    let gens = (0..n)
        .map(|q| {
            let mut e = vec![0; 1 << n];
            e[pos[&(1u32 << q)]] = 1;
            (format!("{var}{}", q + 1), e)
        })
        .collect();
    GradedZAlgebra::from_table(names, degrees, table, gens).expect("flag ring is valid")
}

pub fn ring_bf(n: usize) -> GradedZAlgebra {
    ring_bf_var(n, "x")
}

fn join_names(a: &str, b: &str) -> String {
    match (a, b) {
        ("1", _) => b.to_string(),
        (_, "1") => a.to_string(),
        _ => format!("{a}*{b}"),
    }
}

/// Tensor product over ℤ; generator names must be disjoint.
pub fn ring_tensor(
    a: &GradedZAlgebra,
    b: &GradedZAlgebra,
) -> Result<GradedZAlgebra, CohomologyError> {
    for (n, _) in a.generators() {
        if b.generators().iter().any(|(m, _)| m == n) {
            return Err(CohomologyError::Malformed(format!(
                "generator {n} occurs in both factors"
            )));
        }
    }
    let mut pairs: Vec<(usize, usize)> = (0..a.rank())
        .flat_map(|i| (0..b.rank()).map(move |j| (i, j)))
        .collect();
    pairs.sort_by_key(|&(i, j)| (a.degree_of(i) + b.degree_of(j), i, j));
    let pos: BTreeMap<(usize, usize), usize> =
        pairs.iter().enumerate().map(|(k, &p)| (p, k)).collect();
    let names = pairs
        .iter()
        .map(|&(i, j)| join_names(&a.names()[i], &b.names()[j]))
        .collect();
    let degrees = pairs
        .iter()
        .map(|&(i, j)| a.degree_of(i) + b.degree_of(j))
        .collect();
    let table = pairs
        .iter()
        .map(|&(i1, j1)| {
            pairs
                .iter()
                .map(|&(i2, j2)| {
                    let mut out = Vec::new();
                    for &(ka, ca) in a.table_entry(i1, i2) {
                        for &(kb, cb) in b.table_entry(j1, j2) {
                            if ca * cb != 0 {
                                out.push((pos[&(ka, kb)], ca * cb));
                            }
                        }
                    }
                    out
                })
                .collect()
        })
        .collect();
    let embed = |e: &Elem, left: bool| -> Elem {
        let mut out = vec![0; pairs.len()];
        for (k, &c) in e.iter().enumerate() {
            if c != 0 {
                let key = if left {
                    (k, b.unit_index())
                } else {
                    (a.unit_index(), k)
                };
                out[pos[&key]] = c;
            }
        }
        out
    };
    let gens = a
        .generators()
        .iter()
        .map(|(n, e)| (n.clone(), embed(e, true)))
        .chain(
            b.generators()
                .iter()
                .map(|(n, e)| (n.clone(), embed(e, false))),
        )
        .collect();
    GradedZAlgebra::from_table(names, degrees, table, gens)
}

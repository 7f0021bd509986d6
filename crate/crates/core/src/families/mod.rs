//! Weight hypergraphs of the torus actions on BF_n, BR_{i,j}, R_{i,j} and
//! H_{i,j}, the partial connections known in closed form, and scripted
//! replays of the two non-toricity arguments.

mod connections;
mod graphs;
mod reproduce;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::weightgraph::{GraphError, WeightHypergraph};

pub use connections::{br_partial_connection, r_partial_connection};
pub use graphs::{
    bf_graph, br_graph, br_tangent_weights, hij_graph, r_graph, r_tangent_weights, BrVertex,
    RVertex,
};
pub use reproduce::{reproduce_thm12, reproduce_thm12_cycle, reproduce_thm13};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("inconsistent construction: {0}")]
    Inconsistent(String),
    #[error("step {step}: expected {expected}, forced transport gives {found}")]
    StepMismatch {
        step: usize,
        expected: String,
        found: String,
    },
    #[error("no witness: {0}")]
    NoWitness(String),
}

/// A bitstring u = (u_1, …, u_n) naming a fixed point of BF_n.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FlagIndex {
    pub bits: Vec<bool>,
}

impl FlagIndex {
    pub fn zero(n: usize) -> Self {
        FlagIndex {
            bits: vec![false; n],
        }
    }

    /// The vector with ones exactly at the given (1-based) positions.
    pub fn ones(n: usize, positions: &[usize]) -> Self {
        let mut u = Self::zero(n);
        for &q in positions {
            u.bits[q - 1] = !u.bits[q - 1];
        }
        u
    }

    pub fn all(n: usize) -> Vec<Self> {
        (0..1u32 << n)
            .map(|m| FlagIndex {
                bits: (0..n).map(|q| (m >> q) & 1 == 1).collect(),
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// a_k(u) = max{0, r ≤ k : u_r = 1}
    pub fn a(&self, k: usize) -> usize {
        (1..=k).rev().find(|&r| self.bits[r - 1]).unwrap_or(0)
    }

    /// b_k(u), the other element of {a_{k-1}(u), k}.
    pub fn b(&self, k: usize) -> usize {
        if self.bits[k - 1] {
            self.a(k - 1)
        } else {
            k
        }
    }

    /// u + 1_q
    pub fn flip(&self, q: usize) -> Self {
        let mut u = self.clone();
        u.bits[q - 1] = !u.bits[q - 1];
        u
    }

    pub fn top(&self) -> usize {
        self.a(self.len())
    }
}

impl fmt::Display for FlagIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            write!(f, "{}", if b { '1' } else { '0' })?;
        }
        Ok(())
    }
}

impl FromStr for FlagIndex {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(FamilyError::InvalidParams(format!("bad bitstring `{s}`"))),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(|bits| FlagIndex { bits })
    }
}

/// A family member, addressed as `bf:n`, `br:i,j`, `r:i,j` or `h:i,j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Bf(usize),
    Br(usize, usize),
    R(usize, usize),
    H(usize, usize),
}

impl Family {
    pub fn graph(&self) -> Result<WeightHypergraph, FamilyError> {
        match *self {
            Family::Bf(n) => bf_graph(n),
            Family::Br(i, j) => br_graph(i, j),
            Family::R(i, j) => r_graph(i, j),
            Family::H(i, j) => hij_graph(i, j),
        }
    }

    /// Parse a kind name and its numeric parameters.
    pub fn from_parts(kind: &str, params: &[usize]) -> Result<Self, FamilyError> {
        let bad = || {
            FamilyError::InvalidParams(format!("`{kind}` takes a different number of parameters"))
        };
        Ok(match (kind.to_ascii_lowercase().as_str(), params) {
            ("bf", [n]) => Family::Bf(*n),
            ("br", [i, j]) => Family::Br(*i, *j),
            ("r", [i, j]) => Family::R(*i, *j),
            ("h", [i, j]) => Family::H(*i, *j),
            ("bf" | "br" | "r" | "h", _) => return Err(bad()),
            _ => {
                return Err(FamilyError::InvalidParams(format!(
                    "unknown family `{kind}`"
                )))
            }
        })
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Bf(n) => write!(f, "bf:{n}"),
            Family::Br(i, j) => write!(f, "br:{i},{j}"),
            Family::R(i, j) => write!(f, "r:{i},{j}"),
            Family::H(i, j) => write!(f, "h:{i},{j}"),
        }
    }
}

impl FromStr for Family {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, rest) = s.split_once(':').ok_or_else(|| {
            FamilyError::InvalidParams(format!("expected kind:params, got `{s}`"))
        })?;
        let params = rest
            .split(',')
            .map(|p| p.trim().parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| FamilyError::InvalidParams(format!("bad parameters in `{s}`")))?;
        Family::from_parts(kind, &params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tuple_indices() {
        let u: FlagIndex = "101".parse().unwrap();
        assert_eq!((u.a(1), u.a(2), u.a(3)), (1, 1, 3));
        assert_eq!((u.b(1), u.b(2), u.b(3)), (0, 2, 1));
        for n in 1..=6 {
            for u in FlagIndex::all(n) {
                for k in 1..=n {
                    let mut s: Vec<usize> = (1..=k).map(|r| u.b(r)).collect();
                    s.push(u.a(k));
                    s.sort();
                    assert_eq!(s, (0..=k).collect::<Vec<_>>());
                }
            }
        }
    }

    #[test]
    fn family_addresses() {
        assert_eq!("br:3,2".parse::<Family>().unwrap(), Family::Br(3, 2));
        assert_eq!(Family::from_parts("bf", &[4]).unwrap(), Family::Bf(4));
        assert!("q:1".parse::<Family>().is_err());
        assert!(Family::from_parts("r", &[1]).is_err());
        assert_eq!(Family::R(2, 2).to_string(), "r:2,2");
    }
}

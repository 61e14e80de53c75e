//! Products of projective spaces, optionally twisted into Brauer–Severi
//! varieties, and the cohomology of their line-bundle classes.
//!
//! Everything here is computed on the split form: a twist only constrains
//! which bundles exist over ℚ, never the dimensions of cohomology groups.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::brauer::BrauerClass;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("a variety needs at least one factor")]
    NoFactors,
    #[error("factor {factor}: projective dimension must be at least 1")]
    ZeroDimension { factor: usize },
    #[error("factor {factor}: period {period} of the twist does not divide {degree}")]
    PeriodDivisibility {
        factor: usize,
        period: u64,
        degree: u64,
    },
    #[error("multidegree has {got} entries, variety has {expected} factors")]
    Arity { expected: usize, got: usize },
}

/// One factor `ℙⁿ`, possibly the Brauer–Severi variety of `twist`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Factor {
    #[serde(rename = "dim")]
    pub proj_dim: u32,
    #[serde(default, skip_serializing_if = "BrauerClass::is_split")]
    pub twist: BrauerClass,
}

impl Factor {
    pub fn projective(proj_dim: u32) -> Self {
        Self {
            proj_dim,
            twist: BrauerClass::zero(),
        }
    }

    pub fn brauer_severi(proj_dim: u32, twist: BrauerClass) -> Self {
        Self { proj_dim, twist }
    }

    pub fn is_twisted(&self) -> bool {
        !self.twist.is_split()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct VarietyModel {
    factors: Vec<Factor>,
}

impl VarietyModel {
    pub fn new(factors: Vec<Factor>) -> Result<Self, GeometryError> {
        if factors.is_empty() {
            return Err(GeometryError::NoFactors);
        }
        for (i, f) in factors.iter().enumerate() {
            if f.proj_dim == 0 {
                return Err(GeometryError::ZeroDimension { factor: i });
            }
            let period = f.twist.period();
            let degree = f.proj_dim as u64 + 1;
            if degree % period != 0 {
                return Err(GeometryError::PeriodDivisibility {
                    factor: i,
                    period,
                    degree,
                });
            }
        }
        Ok(Self { factors })
    }

    /// Untwisted `ℙ^{n₁} × … × ℙ^{n_k}`.
    pub fn projective(dims: &[u32]) -> Result<Self, GeometryError> {
        Self::new(dims.iter().map(|&n| Factor::projective(n)).collect())
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn num_factors(&self) -> usize {
        self.factors.len()
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().map(|f| f.proj_dim as usize).sum()
    }

    pub fn has_twist(&self) -> bool {
        self.factors.iter().any(Factor::is_twisted)
    }

    /// Rank of K₀: the product of `n + 1` over the factors.
    pub fn k0_rank(&self) -> usize {
        self.factors.iter().map(|f| f.proj_dim as usize + 1).product()
    }

    pub fn canonical_class(&self) -> MultiDegree {
        MultiDegree(
            self.factors
                .iter()
                .map(|f| -(f.proj_dim as i64 + 1))
                .collect(),
        )
    }

    pub fn check_degree(&self, d: &MultiDegree) -> Result<(), GeometryError> {
        if d.len() != self.factors.len() {
            return Err(GeometryError::Arity {
                expected: self.factors.len(),
                got: d.len(),
            });
        }
        Ok(())
    }
}

impl<'de> Deserialize<'de> for VarietyModel {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Repr {
            factors: Vec<Factor>,
        }
        let repr = Repr::deserialize(deserializer)?;
        VarietyModel::new(repr.factors).map_err(serde::de::Error::custom)
    }
}

/// A line-bundle class `O(d₁, …, d_k)` on the split form, one degree per factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiDegree(pub Vec<i64>);

impl MultiDegree {
    pub fn zero(len: usize) -> Self {
        MultiDegree(vec![0; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn scale(&self, k: i64) -> Self {
        MultiDegree(self.0.iter().map(|x| x * k).collect())
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&x| x >= 0)
    }
}

impl From<Vec<i64>> for MultiDegree {
    fn from(v: Vec<i64>) -> Self {
        MultiDegree(v)
    }
}

impl Add for &MultiDegree {
    type Output = MultiDegree;
    fn add(self, rhs: &MultiDegree) -> MultiDegree {
        assert_eq!(self.len(), rhs.len(), "multidegree arity mismatch");
        MultiDegree(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &MultiDegree {
    type Output = MultiDegree;
    fn sub(self, rhs: &MultiDegree) -> MultiDegree {
        assert_eq!(self.len(), rhs.len(), "multidegree arity mismatch");
        MultiDegree(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &MultiDegree {
    type Output = MultiDegree;
    fn neg(self) -> MultiDegree {
        MultiDegree(self.0.iter().map(|a| -a).collect())
    }
}

impl fmt::Display for MultiDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("O(")?;
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{d}")?;
        }
        f.write_str(")")
    }
}

pub(crate) fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Bott formula on a single `ℙⁿ`: `[h⁰, …, hⁿ]` of `O(a)`.
pub fn projective_cohomology(n: u32, a: i64) -> Vec<u64> {
    let n64 = n as i64;
    let mut h = vec![0u64; n as usize + 1];
    if a >= 0 {
        h[0] = binomial((n64 + a) as u64, n as u64);
    }
    if a <= -n64 - 1 {
        h[n as usize] = binomial((-a - 1) as u64, n as u64);
    }
    h
}

/// `[h⁰, …, h^{dim X}]` of `O(d)` on the split form of `X`, via Künneth.
pub fn cohomology_dims(x: &VarietyModel, d: &MultiDegree) -> Vec<u64> {
    assert_eq!(d.len(), x.num_factors(), "multidegree arity mismatch");
    let mut acc = vec![1u64];
    for (factor, &a) in x.factors().iter().zip(&d.0) {
        let local = projective_cohomology(factor.proj_dim, a);
        let mut next = vec![0u64; acc.len() + local.len() - 1];
        for (i, &u) in acc.iter().enumerate() {
            if u == 0 {
                continue;
            }
            for (j, &v) in local.iter().enumerate() {
                next[i + j] += u * v;
            }
        }
        acc = next;
    }
    acc
}

pub fn euler_char(x: &VarietyModel, d: &MultiDegree) -> i64 {
    cohomology_dims(x, d)
        .iter()
        .enumerate()
        .map(|(i, &h)| if i % 2 == 0 { h as i64 } else { -(h as i64) })
        .sum()
}

/// A monomial in the factor-wise homogeneous coordinates: one exponent vector
/// per factor (`x` for the first factor, `y` for the second, ...).
///
/// Monomials order lexicographically by factor and then by descending
/// exponents, so `x0² < x0·x1 < x0·x2 < x1² < …`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    exponents: Vec<Vec<u32>>,
}

impl Monomial {
    pub fn new(exponents: Vec<Vec<u32>>) -> Self {
        Self { exponents }
    }

    pub fn exponents(&self) -> &[Vec<u32>] {
        &self.exponents
    }

    pub fn degree(&self) -> MultiDegree {
        MultiDegree(
            self.exponents
                .iter()
                .map(|e| e.iter().map(|&x| x as i64).sum())
                .collect(),
        )
    }

    /// Product of two monomials on the same variety.
    ///
    /// Panics if the monomials live on differently shaped varieties.
    pub fn compose(&self, other: &Monomial) -> Monomial {
        assert_eq!(self.exponents.len(), other.exponents.len(), "factor count mismatch");
        Monomial {
            exponents: self
                .exponents
                .iter()
                .zip(&other.exponents)
                .map(|(a, b)| {
                    assert_eq!(a.len(), b.len(), "coordinate count mismatch");
                    a.iter().zip(b).map(|(x, y)| x + y).collect()
                })
                .collect(),
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.exponents.iter().zip(&other.exponents) {
            match b.cmp(a) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        self.exponents.len().cmp(&other.exponents.len())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

const VARIABLES: &[char] = &['x', 'y', 'z', 'u', 'v', 'w'];

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, exps) in self.exponents.iter().enumerate() {
            let var = VARIABLES.get(k).copied().unwrap_or('t');
            for (i, &e) in exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if !first {
                    f.write_str("*")?;
                }
                first = false;
                if VARIABLES.get(k).is_none() {
                    write!(f, "{var}{k}_{i}")?;
                } else {
                    write!(f, "{var}{i}")?;
                }
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}

/// Exponent vectors of length `vars` summing to `deg`, descending lexicographic.
fn exponent_vectors(vars: usize, deg: u32) -> Vec<Vec<u32>> {
    fn go(vars: usize, deg: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if vars == 1 {
            prefix.push(deg);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=deg).rev() {
            prefix.push(e);
            go(vars - 1, deg - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(vars, deg, &mut Vec::with_capacity(vars), &mut out);
    out
}

/// Monomial basis of `H⁰(X, O(d))` on the split form, in increasing order.
/// Empty when some component of `d` is negative.
pub fn hom_monomial_basis(x: &VarietyModel, d: &MultiDegree) -> Vec<Monomial> {
    assert_eq!(d.len(), x.num_factors(), "multidegree arity mismatch");
    if !d.is_nonnegative() {
        return Vec::new();
    }
    let mut basis: Vec<Vec<Vec<u32>>> = vec![Vec::new()];
    for (factor, &a) in x.factors().iter().zip(&d.0) {
        let local = exponent_vectors(factor.proj_dim as usize + 1, a as u32);
        basis = basis
            .into_iter()
            .flat_map(|prefix| {
                local.iter().map(move |e| {
                    let mut m = prefix.clone();
                    m.push(e.clone());
                    m
                })
            })
            .collect();
    }
    basis.into_iter().map(Monomial::new).collect()
}

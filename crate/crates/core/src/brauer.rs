//! Quaternion algebras and Brauer classes over the rationals.
//!
//! A class in Br(ℚ) is stored through its local invariants: a finite map from
//! places to ℚ/ℤ. Classes are kept in canonical form (reduced fractions in
//! `[0, 1)`, zero entries removed), so equality of classes is map equality.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num::integer::Integer;
use num::rational::Rational64;
use num::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BrauerError {
    #[error("quaternion symbol entries must be nonzero")]
    ZeroEntry,
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("invariant at the real place must be 0 or 1/2, got {0}")]
    RealInvariant(Rational64),
    #[error("invariants sum to {0}, not an integer (reciprocity)")]
    Reciprocity(Rational64),
    #[error("invariant denominator must be positive")]
    Denominator,
    #[error("cannot parse {0:?}")]
    Parse(String),
}

/// A place of ℚ: a finite prime or the real place.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Place {
    Prime(u64),
    Infinite,
}

impl Place {
    pub fn prime(p: u64) -> Result<Self, BrauerError> {
        if is_prime(p) {
            Ok(Place::Prime(p))
        } else {
            Err(BrauerError::NotPrime(p))
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Prime(p) => write!(f, "{p}"),
            Place::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Place {
    type Err = BrauerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "∞" => Ok(Place::Infinite),
            other => {
                let p = other
                    .parse::<u64>()
                    .map_err(|_| BrauerError::Parse(s.to_string()))?;
                Place::prime(p)
            }
        }
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u128, out: &mut Vec<u64>) {
    let mut d = 2u128;
    while d * d <= n {
        if n % d == 0 {
            out.push(d as u64);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n as u64);
    }
}

/// Reduce a rational into `[0, 1)`.
fn frac_part(x: Rational64) -> Rational64 {
    let r = x - x.floor();
    debug_assert!(!r.is_negative() && r < Rational64::one());
    r
}

/// An element of Br(ℚ), given by its local invariants.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BrauerClass {
    invariants: BTreeMap<Place, Rational64>,
}

impl BrauerClass {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Build a class from local invariants. Values are reduced mod 1; the real
    /// invariant must be 0 or 1/2 and the invariants must sum to an integer.
    pub fn new<I>(invariants: I) -> Result<Self, BrauerError>
    where
        I: IntoIterator<Item = (Place, Rational64)>,
    {
        let mut map: BTreeMap<Place, Rational64> = BTreeMap::new();
        for (place, value) in invariants {
            let entry = map.entry(place).or_insert_with(Rational64::zero);
            *entry = frac_part(*entry + value);
        }
        map.retain(|_, v| !v.is_zero());
        if let Some(v) = map.get(&Place::Infinite) {
            if *v != Rational64::new(1, 2) {
                return Err(BrauerError::RealInvariant(*v));
            }
        }
        let total: Rational64 = map.values().copied().sum();
        if !total.is_integer() {
            return Err(BrauerError::Reciprocity(total));
        }
        Ok(Self { invariants: map })
    }

    pub fn invariants(&self) -> impl Iterator<Item = (Place, Rational64)> + '_ {
        self.invariants.iter().map(|(p, v)| (*p, *v))
    }

    pub fn invariant(&self, place: Place) -> Rational64 {
        self.invariants.get(&place).copied().unwrap_or_else(Rational64::zero)
    }

    pub fn is_split(&self) -> bool {
        self.invariants.is_empty()
    }

    /// Order of the class in Br(ℚ): lcm of the invariant denominators.
    pub fn period(&self) -> u64 {
        self.invariants
            .values()
            .fold(1i64, |acc, v| acc.lcm(v.denom())) as u64
    }

    /// Index of the underlying division algebra. Over ℚ this equals the period.
    pub fn index(&self) -> u64 {
        self.period()
    }

    /// Class of the tensor product of the two algebras.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut map = self.invariants.clone();
        for (place, value) in &other.invariants {
            let entry = map.entry(*place).or_insert_with(Rational64::zero);
            *entry = frac_part(*entry + value);
        }
        map.retain(|_, v| !v.is_zero());
        Self { invariants: map }
    }

    /// Class of `A^{⊗k}`; negative `k` uses the opposite algebra.
    pub fn power(&self, k: i64) -> Self {
        let mut map: BTreeMap<Place, Rational64> = self
            .invariants
            .iter()
            .map(|(p, v)| (*p, frac_part(*v * Rational64::from_integer(k))))
            .collect();
        map.retain(|_, v| !v.is_zero());
        Self { invariants: map }
    }

    pub fn inverse(&self) -> Self {
        self.power(-1)
    }
}

impl fmt::Display for BrauerClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_split() {
            return f.write_str("0");
        }
        f.write_str("{")?;
        for (i, (place, v)) in self.invariants.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{place}: {v}")?;
        }
        f.write_str("}")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InvariantRepr {
    place: String,
    num: i64,
    den: i64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassRepr {
    invariants: Vec<InvariantRepr>,
}

impl Serialize for BrauerClass {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ClassRepr {
            invariants: self
                .invariants
                .iter()
                .map(|(p, v)| InvariantRepr {
                    place: p.to_string(),
                    num: *v.numer(),
                    den: *v.denom(),
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BrauerClass {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = ClassRepr::deserialize(deserializer)?;
        let mut entries = Vec::with_capacity(repr.invariants.len());
        for inv in repr.invariants {
            if inv.den <= 0 {
                return Err(serde::de::Error::custom(BrauerError::Denominator));
            }
            let place = inv.place.parse::<Place>().map_err(serde::de::Error::custom)?;
            entries.push((place, Rational64::new(inv.num, inv.den)));
        }
        BrauerClass::new(entries).map_err(serde::de::Error::custom)
    }
}

/// The quaternion algebra `(a, b)` over ℚ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuaternionSymbol {
    a: Rational64,
    b: Rational64,
}

impl QuaternionSymbol {
    pub fn new(a: Rational64, b: Rational64) -> Result<Self, BrauerError> {
        if a.is_zero() || b.is_zero() {
            return Err(BrauerError::ZeroEntry);
        }
        Ok(Self { a, b })
    }

    pub fn from_ints(a: i64, b: i64) -> Result<Self, BrauerError> {
        Self::new(Rational64::from_integer(a), Rational64::from_integer(b))
    }

    pub fn a(&self) -> Rational64 {
        self.a
    }

    pub fn b(&self) -> Rational64 {
        self.b
    }

    /// Places where the symbol can ramify: primes dividing `2ab` (numerators
    /// and denominators) and the real place.
    pub fn relevant_places(&self) -> Vec<Place> {
        let mut primes = vec![2];
        for x in [self.a, self.b] {
            prime_factors(x.numer().unsigned_abs() as u128, &mut primes);
            prime_factors(x.denom().unsigned_abs() as u128, &mut primes);
        }
        primes.sort_unstable();
        primes.dedup();
        let mut places: Vec<Place> = primes.into_iter().map(Place::Prime).collect();
        places.push(Place::Infinite);
        places
    }

    pub fn to_brauer(&self) -> BrauerClass {
        quaternion_to_brauer(self)
    }
}

pub fn parse_rational(s: &str) -> Result<Rational64, BrauerError> {
    let err = || BrauerError::Parse(s.to_string());
    let t = s.trim();
    match t.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().map_err(|_| err())?;
            let d: i64 = d.trim().parse().map_err(|_| err())?;
            if d == 0 {
                return Err(err());
            }
            Ok(Rational64::new(n, d))
        }
        None => t.parse::<i64>().map(Rational64::from_integer).map_err(|_| err()),
    }
}

pub fn format_rational(x: Rational64) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SymbolRepr {
    a: String,
    b: String,
}

impl Serialize for QuaternionSymbol {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        SymbolRepr {
            a: format_rational(self.a),
            b: format_rational(self.b),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for QuaternionSymbol {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = SymbolRepr::deserialize(deserializer)?;
        let a = parse_rational(&repr.a).map_err(serde::de::Error::custom)?;
        let b = parse_rational(&repr.b).map_err(serde::de::Error::custom)?;
        QuaternionSymbol::new(a, b).map_err(serde::de::Error::custom)
    }
}

/// Integer in the same square class as `x` (multiply by `den²`).
fn square_class_integer(x: Rational64) -> i128 {
    *x.numer() as i128 * *x.denom() as i128
}

fn valuation(mut n: i128, p: i128) -> (u32, i128) {
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    (v, n)
}

fn pow_mod(mut base: u128, mut exp: u128, m: u128) -> u128 {
    let mut acc = 1u128 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

/// Legendre symbol of a unit `u` modulo an odd prime `p`.
fn legendre(u: i128, p: u64) -> i32 {
    let p128 = p as u128;
    let r = u.rem_euclid(p as i128) as u128;
    if pow_mod(r, (p128 - 1) / 2, p128) == 1 {
        1
    } else {
        -1
    }
}

/// Solubility of `z² = a x² + b y²` over ℤ₂ for `a, b` of 2-adic valuation 0 or 1.
///
/// Any primitive solution modulo 32 lifts: some partial derivative of the form
/// has valuation at most 2, and Hensel's lemma needs precision `2t + 1 ≤ 5`.
fn soluble_at_two(a: i128, b: i128) -> bool {
    const M: i128 = 32;
    let a = a.rem_euclid(M);
    let b = b.rem_euclid(M);
    let squares: Vec<i128> = (0..M).map(|t| t * t % M).collect();
    for x in 0..M {
        for y in 0..M {
            let rhs = (a * squares[x as usize] + b * squares[y as usize]) % M;
            for z in 0..M {
                if x % 2 == 0 && y % 2 == 0 && z % 2 == 0 {
                    continue;
                }
                if squares[z as usize] == rhs {
                    return true;
                }
            }
        }
    }
    false
}

/// Hilbert symbol `(a, b)_v`: `+1` iff `z² = a x² + b y²` has a nontrivial
/// solution over the completion of ℚ at `v`.
pub fn hilbert_symbol(a: Rational64, b: Rational64, v: Place) -> Result<i32, BrauerError> {
    if a.is_zero() || b.is_zero() {
        return Err(BrauerError::ZeroEntry);
    }
    let a = square_class_integer(a);
    let b = square_class_integer(b);
    Ok(match v {
        Place::Infinite => {
            if a < 0 && b < 0 {
                -1
            } else {
                1
            }
        }
        Place::Prime(2) => {
            let (va, ua) = valuation(a, 2);
            let (vb, ub) = valuation(b, 2);
            let a = if va % 2 == 1 { 2 * ua } else { ua };
            let b = if vb % 2 == 1 { 2 * ub } else { ub };
            if soluble_at_two(a, b) {
                1
            } else {
                -1
            }
        }
        Place::Prime(p) => {
            let (alpha, u) = valuation(a, p as i128);
            let (beta, w) = valuation(b, p as i128);
            let mut sign = 1;
            if (alpha * beta) % 2 == 1 && (p - 1) / 2 % 2 == 1 {
                sign = -sign;
            }
            if beta % 2 == 1 {
                sign *= legendre(u, p);
            }
            if alpha % 2 == 1 {
                sign *= legendre(w, p);
            }
            sign
        }
    })
}

/// Brauer class of `(a, b)`: invariant 1/2 exactly where the Hilbert symbol is -1.
pub fn quaternion_to_brauer(q: &QuaternionSymbol) -> BrauerClass {
    let half = Rational64::new(1, 2);
    let ramified = q.relevant_places().into_iter().filter(|v| {
        hilbert_symbol(q.a, q.b, *v).expect("symbol entries are nonzero") == -1
    });
    BrauerClass::new(ramified.map(|v| (v, half)))
        .expect("Hilbert reciprocity holds for quaternion symbols")
}

//! Formal vector bundles: Krull–Schmidt multisets of indecomposable summands
//! that become sums of line bundles on the split form.
//!
//! A [`Summand`] records the split-form line bundle `O(d)` it base-changes to,
//! how many copies of `O(d)` one indecomposable contributes, and the Brauer
//! class of its endomorphism division algebra. That is all the Ext tables and
//! descent criteria consume.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::brauer::BrauerClass;
use crate::geometry::{cohomology_dims, GeometryError, MultiDegree, VarietyModel};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BundleError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("O({degree}) on factor {factor} does not exist over the base field: period {period} does not divide it")]
    PeriodViolation { factor: usize, degree: i64, period: u64 },
    #[error("rank multiplier {got} does not match the index {expected} of the endomorphism class")]
    RankMultiplier { expected: u64, got: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Summand {
    pub degree: MultiDegree,
    pub rank_multiplier: u64,
    pub end_class: BrauerClass,
}

impl Summand {
    /// Indecomposable summand of split type `O(degree)^{⊕ ind}` whose
    /// endomorphism algebra is the division algebra of `end_class`.
    pub fn new(degree: MultiDegree, end_class: BrauerClass) -> Self {
        Self {
            rank_multiplier: end_class.index(),
            degree,
            end_class,
        }
    }

    pub fn with_multiplier(
        degree: MultiDegree,
        rank_multiplier: u64,
        end_class: BrauerClass,
    ) -> Result<Self, BundleError> {
        let expected = end_class.index();
        if rank_multiplier != expected {
            return Err(BundleError::RankMultiplier {
                expected,
                got: rank_multiplier,
            });
        }
        Ok(Self {
            degree,
            rank_multiplier,
            end_class,
        })
    }

    /// The line bundle `O(degree)` on the split form.
    pub fn line(degree: MultiDegree) -> Self {
        Self::new(degree, BrauerClass::zero())
    }

    pub fn is_line(&self) -> bool {
        self.end_class.is_split()
    }

    pub fn dual(&self) -> Self {
        Self {
            degree: -&self.degree,
            rank_multiplier: self.rank_multiplier,
            end_class: self.end_class.inverse(),
        }
    }

    /// The split-form line bundle underneath this summand.
    pub fn split_line(&self) -> Self {
        Self::line(self.degree.clone())
    }
}

impl fmt::Display for Summand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_line() {
            write!(f, "{}", self.degree)
        } else {
            let inner: Vec<String> = self.degree.0.iter().map(|d| d.to_string()).collect();
            write!(f, "W({})[ind {}]", inner.join(","), self.rank_multiplier)
        }
    }
}

/// A direct sum of indecomposable summands with multiplicities, in canonical
/// (sorted, merged) form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct FormalBundle {
    summands: BTreeMap<Summand, u64>,
}

impl FormalBundle {
    pub fn new<I: IntoIterator<Item = (Summand, u64)>>(items: I) -> Self {
        let mut summands = BTreeMap::new();
        for (s, m) in items {
            if m > 0 {
                *summands.entry(s).or_insert(0) += m;
            }
        }
        Self { summands }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn single(s: Summand) -> Self {
        Self::new([(s, 1)])
    }

    pub fn line(degree: MultiDegree) -> Self {
        Self::single(Summand::line(degree))
    }

    pub fn is_zero(&self) -> bool {
        self.summands.is_empty()
    }

    pub fn summands(&self) -> impl Iterator<Item = (&Summand, u64)> {
        self.summands.iter().map(|(s, m)| (s, *m))
    }

    pub fn num_distinct(&self) -> usize {
        self.summands.len()
    }

    pub fn multiplicity(&self, s: &Summand) -> u64 {
        self.summands.get(s).copied().unwrap_or(0)
    }

    pub fn rank(&self) -> u64 {
        self.summands
            .iter()
            .map(|(s, m)| m * s.rank_multiplier)
            .sum()
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        Self::new(
            self.summands()
                .chain(other.summands())
                .map(|(s, m)| (s.clone(), m)),
        )
    }

    /// `E^{⊕k}`.
    pub fn repeat(&self, k: u64) -> Self {
        Self::new(self.summands().map(|(s, m)| (s.clone(), m * k)))
    }

    /// Multiset of line bundles after base change to the separable closure.
    pub fn split_form(&self) -> BTreeMap<MultiDegree, u64> {
        let mut out = BTreeMap::new();
        for (s, m) in self.summands() {
            *out.entry(s.degree.clone()).or_insert(0) += m * s.rank_multiplier;
        }
        out
    }

    /// The split form as a bundle of line-bundle summands.
    pub fn split_bundle(&self) -> Self {
        Self::new(
            self.split_form()
                .into_iter()
                .map(|(d, m)| (Summand::line(d), m)),
        )
    }

    /// Shift every summand degree without checking existence over the base field.
    pub(crate) fn shift_unchecked(&self, d: &MultiDegree) -> Self {
        Self::new(self.summands().map(|(s, m)| {
            (
                Summand {
                    degree: &s.degree + d,
                    rank_multiplier: s.rank_multiplier,
                    end_class: s.end_class.clone(),
                },
                m,
            )
        }))
    }
}

impl fmt::Display for FormalBundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (s, m)) in self.summands().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if m == 1 {
                write!(f, "{s}")?;
            } else {
                write!(f, "{s}^{m}")?;
            }
        }
        Ok(())
    }
}

impl Serialize for FormalBundle {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry<'a> {
            degree: &'a MultiDegree,
            mult: u64,
            rank_multiplier: u64,
            #[serde(skip_serializing_if = "BrauerClass::is_split")]
            end_class: &'a BrauerClass,
        }
        #[derive(Serialize)]
        struct Repr<'a> {
            summands: Vec<Entry<'a>>,
        }
        Repr {
            summands: self
                .summands
                .iter()
                .map(|(s, m)| Entry {
                    degree: &s.degree,
                    mult: *m,
                    rank_multiplier: s.rank_multiplier,
                    end_class: &s.end_class,
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

/// Endomorphism class of the indecomposable AS-bundle of split type `O(i)`:
/// the tensor over factors of `twist^{⊗ i_factor}`.
pub fn as_class(x: &VarietyModel, i: &MultiDegree) -> Result<BrauerClass, BundleError> {
    x.check_degree(i)?;
    Ok(x
        .factors()
        .iter()
        .zip(&i.0)
        .fold(BrauerClass::zero(), |acc, (f, &k)| acc.tensor(&f.twist.power(k))))
}

/// The indecomposable AS-bundle `W_i` (a line bundle when the class is split).
pub fn as_summand(x: &VarietyModel, i: &MultiDegree) -> Result<Summand, BundleError> {
    Ok(Summand::new(i.clone(), as_class(x, i)?))
}

pub fn as_bundle(x: &VarietyModel, i: &MultiDegree) -> Result<FormalBundle, BundleError> {
    Ok(FormalBundle::single(as_summand(x, i)?))
}

/// External tensor product of the per-factor AS-bundles `W_{i_1} ⊠ … ⊠ W_{i_k}`.
///
/// Its endomorphism algebra is `⊗ End(W_{i_f}) ≅ M_m(D)`, so the product splits
/// into `m` copies of the indecomposable with class `[D]`, where `m` is the
/// product of the factor indices divided by `ind(D)`.
pub fn box_product(x: &VarietyModel, i: &MultiDegree) -> Result<FormalBundle, BundleError> {
    x.check_degree(i)?;
    let total: u64 = x
        .factors()
        .iter()
        .zip(&i.0)
        .map(|(f, &k)| f.twist.power(k).index())
        .product();
    let s = as_summand(x, i)?;
    let copies = total / s.rank_multiplier;
    Ok(FormalBundle::new([(s, copies)]))
}

pub fn dual(e: &FormalBundle) -> FormalBundle {
    FormalBundle::new(e.summands().map(|(s, m)| (s.dual(), m)))
}

/// `E ⊗ O(d)`. On a twisted factor `d` must be a multiple of the period,
/// otherwise `O(d)` is not defined over the base field.
pub fn twist_by(
    x: &VarietyModel,
    e: &FormalBundle,
    d: &MultiDegree,
) -> Result<FormalBundle, BundleError> {
    x.check_degree(d)?;
    for (factor, (f, &k)) in x.factors().iter().zip(&d.0).enumerate() {
        let period = f.twist.period();
        if k.rem_euclid(period as i64) != 0 {
            return Err(BundleError::PeriodViolation {
                factor,
                degree: k,
                period,
            });
        }
    }
    Ok(e.shift_unchecked(d))
}

fn add_scaled(acc: &mut [u64], h: &[u64], k: u64) {
    for (a, b) in acc.iter_mut().zip(h) {
        *a += k * b;
    }
}

/// Size of the split-form block of a summand: `mult · rank_multiplier`.
fn block_size(s: &Summand, m: u64) -> u64 {
    m * s.rank_multiplier
}

/// `dim Ext^r(s, t)` for a single pair of summands (one copy each).
pub fn summand_ext(x: &VarietyModel, s: &Summand, t: &Summand) -> Vec<u64> {
    let h = cohomology_dims(x, &(&t.degree - &s.degree));
    let k = s.rank_multiplier * t.rank_multiplier;
    h.into_iter().map(|v| v * k).collect()
}

/// `[dim Ext^0(E, F), …, dim Ext^{dim X}(E, F)]`, identical over `k` and `k^s`.
pub fn ext_dims(x: &VarietyModel, e: &FormalBundle, f: &FormalBundle) -> Vec<u64> {
    let mut acc = vec![0u64; x.dim() + 1];
    for (s, ms) in e.summands() {
        for (t, mt) in f.summands() {
            let h = cohomology_dims(x, &(&t.degree - &s.degree));
            add_scaled(&mut acc, &h, block_size(s, ms) * block_size(t, mt));
        }
    }
    acc
}

pub fn euler_pairing(x: &VarietyModel, e: &FormalBundle, f: &FormalBundle) -> i64 {
    ext_dims(x, e, f)
        .iter()
        .enumerate()
        .map(|(r, &v)| if r % 2 == 0 { v as i64 } else { -(v as i64) })
        .sum()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EndBlock {
    pub size: u64,
    pub class: BrauerClass,
}

/// The semisimple quotient `End(E)/rad` as a product of matrix algebras over
/// division algebras, plus whether the radical is nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EndAlgebraDescription {
    pub blocks: Vec<EndBlock>,
    pub has_radical: bool,
}

impl EndAlgebraDescription {
    pub fn is_semisimple(&self) -> bool {
        !self.has_radical
    }

    pub fn is_division(&self) -> bool {
        !self.has_radical && self.blocks.len() == 1 && self.blocks[0].size == 1
    }

    pub fn is_split_product(&self) -> bool {
        !self.has_radical && self.blocks.iter().all(|b| b.class.is_split())
    }
}

pub fn end_algebra(x: &VarietyModel, e: &FormalBundle) -> EndAlgebraDescription {
    let blocks = e
        .summands()
        .map(|(s, m)| EndBlock {
            size: m,
            class: s.end_class.clone(),
        })
        .collect();
    let summands: Vec<&Summand> = e.summands().map(|(s, _)| s).collect();
    let has_radical = summands.iter().enumerate().any(|(i, s)| {
        summands.iter().enumerate().any(|(j, t)| {
            i != j && cohomology_dims(x, &(&t.degree - &s.degree))[0] > 0
        })
    });
    EndAlgebraDescription { blocks, has_radical }
}

pub fn is_rigid(x: &VarietyModel, e: &FormalBundle) -> bool {
    ext_dims(x, e, e).get(1).copied().unwrap_or(0) == 0
}

/// Exceptionality labels, strongest first. Over ℚ every semisimple algebra is
/// separable, so `SeparableExceptional` and `SemiExceptional` coincide and the
/// classifier reports the former.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Exceptionality {
    Exceptional,
    WeakExceptional,
    SeparableExceptional,
    SemiExceptional,
    None,
}

impl Exceptionality {
    pub fn is_weak(self) -> bool {
        matches!(self, Self::Exceptional | Self::WeakExceptional)
    }

    pub fn is_separable(self) -> bool {
        !matches!(self, Self::None)
    }
}

pub fn classify_exceptionality(x: &VarietyModel, e: &FormalBundle) -> Exceptionality {
    if e.is_zero() {
        return Exceptionality::None;
    }
    if ext_dims(x, e, e).iter().skip(1).any(|&v| v != 0) {
        return Exceptionality::None;
    }
    let end = end_algebra(x, e);
    if end.has_radical {
        return Exceptionality::None;
    }
    if end.is_division() {
        if end.blocks[0].class.is_split() {
            Exceptionality::Exceptional
        } else {
            Exceptionality::WeakExceptional
        }
    } else {
        Exceptionality::SeparableExceptional
    }
}

/// Why a collection fails to be a split semisimple exceptional block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BlockViolation {
    CrossHom { from: usize, to: usize, dim: u64 },
    CrossExt { from: usize, to: usize, degree: usize, dim: u64 },
    SelfExt { member: usize, degree: usize, dim: u64 },
    NonSplitEnd { class: BrauerClass },
    Radical,
}

pub fn check_split_semisimple_block(
    x: &VarietyModel,
    members: &[FormalBundle],
) -> Result<(), BlockViolation> {
    for (i, e) in members.iter().enumerate() {
        for (j, f) in members.iter().enumerate() {
            if i == j {
                continue;
            }
            let ext = ext_dims(x, e, f);
            if ext[0] != 0 {
                return Err(BlockViolation::CrossHom {
                    from: i,
                    to: j,
                    dim: ext[0],
                });
            }
            if let Some((r, &dim)) = ext.iter().enumerate().skip(1).find(|(_, &v)| v != 0) {
                return Err(BlockViolation::CrossExt {
                    from: i,
                    to: j,
                    degree: r,
                    dim,
                });
            }
        }
    }
    for (i, e) in members.iter().enumerate() {
        let ext = ext_dims(x, e, e);
        if let Some((r, &dim)) = ext.iter().enumerate().skip(1).find(|(_, &v)| v != 0) {
            return Err(BlockViolation::SelfExt {
                member: i,
                degree: r,
                dim,
            });
        }
    }
    let total = members
        .iter()
        .fold(FormalBundle::zero(), |acc, e| acc.direct_sum(e));
    let end = end_algebra(x, &total);
    if let Some(b) = end.blocks.iter().find(|b| !b.class.is_split()) {
        return Err(BlockViolation::NonSplitEnd {
            class: b.class.clone(),
        });
    }
    if end.has_radical {
        return Err(BlockViolation::Radical);
    }
    Ok(())
}

pub fn is_split_semisimple_block(x: &VarietyModel, members: &[FormalBundle]) -> bool {
    check_split_semisimple_block(x, members).is_ok()
}

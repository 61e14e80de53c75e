//! w-helices of type `(n, d)`: a thread of `n` bundles extended to all of ℤ by
//! `V_{i-n} = V_i ⊗ ω_X`, their verification over a finite window, the
//! rolled-up quiver, and the cohomology-vanishing hypothesis for tilting on the
//! total space of `ω_X^∨`.
//!
//! Helix indices are 1-based on the thread: `V_1, …, V_n` are the thread
//! members and vertex `v_k` of the rolled-up quiver is the class of `V_{k+1}`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bundles::{
    as_bundle, classify_exceptionality, euler_pairing, ext_dims, twist_by, BundleError,
    Exceptionality, FormalBundle, Summand,
};
use crate::geometry::{cohomology_dims, hom_monomial_basis, Factor, MultiDegree, VarietyModel};
use crate::linalg::Echelon;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HelixError {
    #[error(transparent)]
    Bundle(#[from] BundleError),
    #[error("a helix thread needs at least one member")]
    EmptyThread,
    #[error("type (n, {d}) on a variety of dimension {dim} needs a shift of {shift}; only sheaf helices (dim X + 1 = d) are supported")]
    ShiftedType { dim: usize, d: u32, shift: i64 },
    #[error("window {window} is smaller than the thread length {n}")]
    WindowTooSmall { window: usize, n: usize },
    #[error("arrow count a({i},{j}) = {count} beyond the window {window}; enlarge the window")]
    WindowBoundary { i: i64, j: i64, count: u64, window: usize },
    #[error("arrow counts need i < j, got ({i}, {j})")]
    Order { i: i64, j: i64 },
    #[error("helix is not geometric over the window; the rolled-up quiver is undefined")]
    NotGeometric,
    #[error("monomial model unavailable for Hom({from}, {to})")]
    MonomialModel { from: MultiDegree, to: MultiDegree },
    #[error("expected two Brauer-Severi curve factors")]
    NotCurveProduct,
    #[error("the two curve factors carry the same Brauer class")]
    EqualClasses,
}

/// Which exceptionality the thread members must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strictness {
    /// Weak exceptional: endomorphism algebra a division algebra.
    #[default]
    Weak,
    /// Separable exceptional: semisimple endomorphism algebra.
    Separable,
}

impl Strictness {
    pub fn accepts(self, label: Exceptionality) -> bool {
        match self {
            Strictness::Weak => label.is_weak(),
            Strictness::Separable => label.is_separable(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HelixSpec {
    x: VarietyModel,
    thread: Vec<FormalBundle>,
    d: u32,
}

impl HelixSpec {
    pub fn new(x: VarietyModel, thread: Vec<FormalBundle>, d: u32) -> Result<Self, HelixError> {
        if thread.is_empty() {
            return Err(HelixError::EmptyThread);
        }
        let shift = x.dim() as i64 + 1 - d as i64;
        if shift != 0 {
            return Err(HelixError::ShiftedType {
                dim: x.dim(),
                d,
                shift,
            });
        }
        Ok(Self { x, thread, d })
    }

    /// `(O, O(1), …, O(n))` on `ℙⁿ`, type `(n+1, n+1)`.
    pub fn beilinson(n: u32) -> Result<Self, HelixError> {
        let x = VarietyModel::projective(&[n]).map_err(BundleError::from)?;
        let thread = (0..=n as i64)
            .map(|i| FormalBundle::line(MultiDegree(vec![i])))
            .collect();
        Self::new(x, thread, n + 1)
    }

    /// `(W_0, …, W_n)` on a single (possibly twisted) factor `ℙⁿ`.
    pub fn as_helix(x: VarietyModel) -> Result<Self, HelixError> {
        if x.num_factors() != 1 {
            return Err(HelixError::Bundle(BundleError::Geometry(
                crate::geometry::GeometryError::Arity {
                    expected: 1,
                    got: x.num_factors(),
                },
            )));
        }
        let n = x.factors()[0].proj_dim;
        let thread = (0..=n as i64)
            .map(|i| as_bundle(&x, &MultiDegree(vec![i])))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(x, thread, n + 1)
    }

    /// `(O, V_1 ⊠ O, O ⊠ W_1, U_{1,1})` on a product of two Brauer–Severi
    /// curves with distinct classes, type `(4, 3)`. `U_{1,1}` is the
    /// indecomposable AS-bundle of split type `O(1,1)`.
    pub fn curve_product(x: VarietyModel) -> Result<Self, HelixError> {
        let factors: &[Factor] = x.factors();
        if factors.len() != 2 || factors.iter().any(|f| f.proj_dim != 1) {
            return Err(HelixError::NotCurveProduct);
        }
        if factors[0].twist == factors[1].twist {
            return Err(HelixError::EqualClasses);
        }
        let thread = [[0, 0], [1, 0], [0, 1], [1, 1]]
            .iter()
            .map(|d| as_bundle(&x, &MultiDegree(d.to_vec())))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(x, thread, 3)
    }

    pub fn variety(&self) -> &VarietyModel {
        &self.x
    }

    pub fn thread(&self) -> &[FormalBundle] {
        &self.thread
    }

    pub fn n(&self) -> usize {
        self.thread.len()
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn default_window(&self) -> usize {
        3 * self.n()
    }

    /// `V_i` for any `i ∈ ℤ`.
    pub fn extend(&self, i: i64) -> Result<FormalBundle, HelixError> {
        let n = self.n() as i64;
        let r = (i - 1).rem_euclid(n) + 1;
        let q = (i - r) / n;
        let anti = -&self.x.canonical_class();
        Ok(twist_by(&self.x, &self.thread[(r - 1) as usize], &anti.scale(q))?)
    }

    /// The helix whose thread is `(V_{k+1}, …, V_{k+n})`.
    pub fn shifted(&self, k: i64) -> Result<Self, HelixError> {
        let thread = (1..=self.n() as i64)
            .map(|i| self.extend(i + k))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(self.x.clone(), thread, self.d)
    }

    fn members(&self, lo: i64, hi: i64) -> Result<Vec<FormalBundle>, HelixError> {
        (lo..=hi).map(|i| self.extend(i)).collect()
    }
}

/// A failed check, located by helix indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// `dim Ext^degree(V_from, V_to) = dim`, which should vanish.
    Ext {
        from: i64,
        to: i64,
        degree: usize,
        dim: u64,
    },
    /// `V_index` is not exceptional enough.
    Member { index: i64, label: Exceptionality },
    /// Diagonal Euler pairing of `V_index` differs from the semisimple count.
    Gram { index: i64, value: i64, expected: i64 },
    /// Thread length differs from the rank of K₀.
    K0 { thread_length: usize, k0_rank: usize },
    /// Ext periodicity failed for a shifted pair.
    Periodicity { from: i64, to: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Axiom {
    pub passed: bool,
    pub witnesses: Vec<Witness>,
}

impl Axiom {
    fn from_witnesses(w: BTreeSet<Witness>) -> Self {
        Self {
            passed: w.is_empty(),
            witnesses: w.into_iter().collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Fullness {
    /// Necessary numerical conditions hold; generation itself is not proved.
    NumericallyConsistent,
    Inconsistent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WhelixReport {
    pub n: usize,
    pub d: u32,
    pub window: usize,
    pub strictness: Strictness,
    pub k0_rank: usize,
    pub exceptionality: Axiom,
    pub semiorthogonality: Axiom,
    pub fullness: Axiom,
    pub fullness_status: Fullness,
    pub passed: bool,
}

fn semisimple_count(e: &FormalBundle) -> i64 {
    e.summands()
        .map(|(s, m)| {
            let size = (m * s.rank_multiplier) as i64;
            size * size
        })
        .sum()
}

/// Check the w-helix axioms on every thread `(V_{l+1}, …, V_{l+n})` with
/// `l ∈ [-window, window]`.
pub fn verify_whelix(
    h: &HelixSpec,
    window: usize,
    strictness: Strictness,
) -> Result<WhelixReport, HelixError> {
    let n = h.n();
    if window < n {
        return Err(HelixError::WindowTooSmall { window, n });
    }
    let x = h.variety();
    let w = window as i64;
    let members = h.members(-w + 1, w + n as i64)?;
    let at = |i: i64| &members[(i + w - 1) as usize];

    let mut exc = BTreeSet::new();
    for i in (-w + 1)..=(w + n as i64) {
        let label = classify_exceptionality(x, at(i));
        if !strictness.accepts(label) {
            exc.insert(Witness::Member { index: i, label });
        }
    }

    let mut semi = BTreeSet::new();
    let mut full = BTreeSet::new();
    if n != x.k0_rank() {
        full.insert(Witness::K0 {
            thread_length: n,
            k0_rank: x.k0_rank(),
        });
    }
    for l in -w..=w {
        for a in (l + 1)..=(l + n as i64) {
            let expected = semisimple_count(at(a));
            let value = euler_pairing(x, at(a), at(a));
            if value != expected {
                full.insert(Witness::Gram {
                    index: a,
                    value,
                    expected,
                });
            }
            for b in (a + 1)..=(l + n as i64) {
                let ext = ext_dims(x, at(b), at(a));
                for (degree, &dim) in ext.iter().enumerate() {
                    if dim != 0 {
                        semi.insert(Witness::Ext {
                            from: b,
                            to: a,
                            degree,
                            dim,
                        });
                    }
                }
            }
        }
    }

    let exceptionality = Axiom::from_witnesses(exc);
    let semiorthogonality = Axiom::from_witnesses(semi);
    let fullness = Axiom::from_witnesses(full);
    let fullness_status = if fullness.passed {
        Fullness::NumericallyConsistent
    } else {
        Fullness::Inconsistent
    };
    let passed = exceptionality.passed && semiorthogonality.passed && fullness.passed;
    Ok(WhelixReport {
        n,
        d: h.d(),
        window,
        strictness,
        k0_rank: x.k0_rank(),
        exceptionality,
        semiorthogonality,
        fullness,
        fullness_status,
        passed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Closure {
    /// Bott vanishing covers every pair beyond the window.
    VerifiedInWindowWithClosure,
    VerifiedInWindowOnly,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeometricReport {
    pub window: usize,
    pub pairs_checked: usize,
    pub vanishing: Axiom,
    pub periodicity: Axiom,
    pub closure: Closure,
    pub passed: bool,
}

/// Smallest per-factor degree difference between summands of two thread members.
fn min_thread_difference(h: &HelixSpec) -> Vec<i64> {
    let k = h.variety().num_factors();
    let mut min = vec![i64::MAX; k];
    let summands: Vec<&Summand> = h
        .thread()
        .iter()
        .flat_map(|e| e.summands().map(|(s, _)| s))
        .collect();
    for s in &summands {
        for t in &summands {
            for (f, m) in min.iter_mut().enumerate() {
                *m = (*m).min(t.degree.0[f] - s.degree.0[f]);
            }
        }
    }
    min
}

/// Whether Bott vanishing settles every pair `j - i > window`: all degree
/// differences there are at least `-dim` on each factor, where no higher
/// cohomology survives.
fn closure_applies(h: &HelixSpec, window: usize) -> bool {
    let n = h.n() as i64;
    let periods = (window as i64 - n + 2 + n - 1).div_euclid(n).max(0);
    let min = min_thread_difference(h);
    h.variety()
        .factors()
        .iter()
        .zip(min)
        .all(|(f, delta)| {
            let m = f.proj_dim as i64;
            delta + periods * (m + 1) >= -m
        })
}

/// `Ext^r(V_i, V_j) = 0` for `r ≠ 0`, `i` over one period, `0 < j - i ≤ window`.
pub fn verify_geometric(h: &HelixSpec, window: usize) -> Result<GeometricReport, HelixError> {
    let n = h.n() as i64;
    if window < h.n() {
        return Err(HelixError::WindowTooSmall { window, n: h.n() });
    }
    let x = h.variety();
    let w = window as i64;
    let members = h.members(1 - n, n + w)?;
    let at = |i: i64| &members[(i + n - 1) as usize];

    let mut vanishing = BTreeSet::new();
    let mut periodicity = BTreeSet::new();
    let mut pairs = 0;
    for i in 1..=n {
        for j in (i + 1)..=(i + w) {
            pairs += 1;
            let ext = ext_dims(x, at(i), at(j));
            for (degree, &dim) in ext.iter().enumerate().skip(1) {
                if dim != 0 {
                    vanishing.insert(Witness::Ext {
                        from: i,
                        to: j,
                        degree,
                        dim,
                    });
                }
            }
            if j - n <= n + w && ext_dims(x, at(i - n), at(j - n)) != ext {
                periodicity.insert(Witness::Periodicity { from: i, to: j });
            }
        }
    }
    let vanishing = Axiom::from_witnesses(vanishing);
    let periodicity = Axiom::from_witnesses(periodicity);
    let closure = if closure_applies(h, window) {
        Closure::VerifiedInWindowWithClosure
    } else {
        Closure::VerifiedInWindowOnly
    };
    let passed = vanishing.passed && periodicity.passed;
    Ok(GeometricReport {
        window,
        pairs_checked: pairs,
        vanishing,
        periodicity,
        closure,
        passed,
    })
}

/// `dim Hom(V_i, V_j)`.
pub fn helix_hom_dim(h: &HelixSpec, i: i64, j: i64) -> Result<u64, HelixError> {
    Ok(ext_dims(h.variety(), &h.extend(i)?, &h.extend(j)?)[0])
}

/// Rank of the monomial multiplication `⊕_u H⁰(u - s) ⊗ H⁰(t - u) → H⁰(t - s)`
/// for intermediate degrees `u`, computed exactly.
fn composition_rank(
    x: &VarietyModel,
    s: &MultiDegree,
    t: &MultiDegree,
    intermediates: &[&MultiDegree],
) -> Result<(usize, usize), HelixError> {
    let target = hom_monomial_basis(x, &(t - s));
    let h0 = cohomology_dims(x, &(t - s))[0] as usize;
    if target.len() != h0 {
        return Err(HelixError::MonomialModel {
            from: s.clone(),
            to: t.clone(),
        });
    }
    if target.is_empty() {
        return Ok((0, 0));
    }
    let index: HashMap<_, usize> = target.iter().enumerate().map(|(k, m)| (m.clone(), k)).collect();
    let mut ech = Echelon::new();
    for u in intermediates {
        let left = hom_monomial_basis(x, &(*u - s));
        if left.is_empty() {
            continue;
        }
        let right = hom_monomial_basis(x, &(t - *u));
        for a in &left {
            for b in &right {
                let product = a.compose(b);
                let row = *index.get(&product).ok_or_else(|| HelixError::MonomialModel {
                    from: s.clone(),
                    to: t.clone(),
                })?;
                ech.insert_unit(row);
                if ech.rank() == target.len() {
                    return Ok((target.len(), target.len()));
                }
            }
        }
    }
    Ok((target.len(), ech.rank()))
}

/// `a_{i,j}`: dimension of the cokernel of the composition map
/// `⊕_{i<l<j} Hom(V_i, V_l) ⊗ Hom(V_l, V_j) → Hom(V_i, V_j)`.
///
/// On the split form the map is block diagonal over summand pairs `(s, t)`;
/// each block is monomial multiplication tensored with the full matrix space
/// on the multiplicity spaces, so its cokernel scales by both block sizes.
pub fn arrow_count(h: &HelixSpec, i: i64, j: i64) -> Result<u64, HelixError> {
    if i >= j {
        return Err(HelixError::Order { i, j });
    }
    let members = h.members(i, j)?;
    let source = &members[0];
    let target = &members[members.len() - 1];
    let inner: Vec<&MultiDegree> = members[1..members.len() - 1]
        .iter()
        .flat_map(|e| e.summands().map(|(u, _)| &u.degree))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut total = 0u64;
    for (s, ms) in source.summands() {
        for (t, mt) in target.summands() {
            let (dim, rank) = composition_rank(h.variety(), &s.degree, &t.degree, &inner)?;
            let sizes = ms * s.rank_multiplier * mt * t.rank_multiplier;
            total += sizes * (dim - rank) as u64;
        }
    }
    Ok(total)
}

/// Quiver of the rolled-up helix algebra on `ℤ/nℤ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuiverDescription {
    pub n: usize,
    pub arrow_counts: BTreeMap<(usize, usize), u64>,
}

impl QuiverDescription {
    pub fn count(&self, i: usize, j: usize) -> u64 {
        self.arrow_counts.get(&(i, j)).copied().unwrap_or(0)
    }

    pub fn total_arrows(&self) -> u64 {
        self.arrow_counts.values().sum()
    }

    pub fn out_degree(&self, i: usize) -> u64 {
        (0..self.n).map(|j| self.count(i, j)).sum()
    }

    /// Directed multigraph in DOT: nodes `v0..v{n-1}`, one edge line per arrow,
    /// labelled `a{i}_{j}_{k}` for the `k`-th arrow from `v_i` to `v_j`.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph rolled_up_quiver {\n");
        for v in 0..self.n {
            let _ = writeln!(out, "  v{v} [label=\"v{v}\"];");
        }
        for (&(i, j), &c) in &self.arrow_counts {
            for k in 1..=c {
                let _ = writeln!(out, "  v{i} -> v{j} [label=\"a{i}_{j}_{k}\"];");
            }
        }
        out.push_str("}\n");
        out
    }
}

impl Serialize for QuiverDescription {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Arrow {
            from: usize,
            to: usize,
            count: u64,
        }
        #[derive(Serialize)]
        struct Repr {
            vertices: usize,
            arrows: Vec<Arrow>,
        }
        Repr {
            vertices: self.n,
            arrows: self
                .arrow_counts
                .iter()
                .map(|(&(from, to), &count)| Arrow { from, to, count })
                .collect(),
        }
        .serialize(serializer)
    }
}

/// `n_{ij} = Σ_p a_{i, j+pn}` over `0 < j + pn - i ≤ window`. The following
/// period past the window must contribute no arrows.
pub fn rolled_up_quiver(h: &HelixSpec, window: usize) -> Result<QuiverDescription, HelixError> {
    if !verify_geometric(h, window)?.passed {
        return Err(HelixError::NotGeometric);
    }
    let n = h.n();
    let mut arrow_counts = BTreeMap::new();
    for v in 0..n {
        let i = v as i64 + 1;
        for t in 1..=window {
            let a = arrow_count(h, i, i + t as i64)?;
            if a > 0 {
                *arrow_counts.entry((v, (v + t) % n)).or_insert(0) += a;
            }
        }
        for t in (window + 1)..=(window + n) {
            let j = i + t as i64;
            let count = arrow_count(h, i, j)?;
            if count != 0 {
                return Err(HelixError::WindowBoundary {
                    i,
                    j,
                    count,
                    window,
                });
            }
        }
    }
    Ok(QuiverDescription { n, arrow_counts })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TiltingWitness {
    pub degree: usize,
    pub l: u32,
    pub from: Summand,
    pub to: Summand,
    pub dim: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TiltingReport {
    pub thread_index: i64,
    pub max_l: u32,
    /// First `l` from which every twisted degree clears the Bott threshold on
    /// every factor; past it the vanishing is automatic.
    pub threshold_l: Option<u32>,
    pub certified_beyond_max_l: bool,
    pub witnesses: Vec<TiltingWitness>,
    pub passed: bool,
}

/// `H^i(X, T^∨ ⊗ T ⊗ ω^{-l}) = 0` for `i ≠ 0` and `l = 1..=max_l`, where `T`
/// is the direct sum of the thread `(V_{k+1}, …, V_{k+n})`.
pub fn check_tilting_hypothesis(
    h: &HelixSpec,
    thread_index: i64,
    max_l: u32,
) -> Result<TiltingReport, HelixError> {
    let x = h.variety();
    let thread = h.members(thread_index + 1, thread_index + h.n() as i64)?;
    let summands: Vec<Summand> = thread
        .iter()
        .flat_map(|e| e.summands().map(|(s, _)| s.clone()))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let anti = -&x.canonical_class();
    let mut witnesses = Vec::new();
    for l in 1..=max_l {
        let shift = anti.scale(l as i64);
        for s in &summands {
            for t in &summands {
                let deg = &(&t.degree - &s.degree) + &shift;
                for (degree, &dim) in cohomology_dims(x, &deg).iter().enumerate().skip(1) {
                    if dim != 0 {
                        witnesses.push(TiltingWitness {
                            degree,
                            l,
                            from: s.clone(),
                            to: t.clone(),
                            dim: dim * s.rank_multiplier * t.rank_multiplier,
                        });
                    }
                }
            }
        }
    }
    let mut min = vec![i64::MAX; x.num_factors()];
    for s in &summands {
        for t in &summands {
            for (f, m) in min.iter_mut().enumerate() {
                *m = (*m).min(t.degree.0[f] - s.degree.0[f]);
            }
        }
    }
    let clears = |l: i64| {
        x.factors().iter().zip(&min).all(|(f, &delta)| {
            let m = f.proj_dim as i64;
            delta + l * (m + 1) >= -m
        })
    };
    let threshold_l = (1..=max_l.max(1)).find(|&l| clears(l as i64));
    let passed = witnesses.is_empty();
    Ok(TiltingReport {
        thread_index,
        max_l,
        threshold_l,
        certified_beyond_max_l: threshold_l.is_some_and(|l| l <= max_l),
        witnesses,
        passed,
    })
}

//! Galois orbits on Krull–Schmidt summands and the descent criteria for rigid
//! bundles.
//!
//! The Galois group is modelled by permutations of summand labels. An action is
//! admissible only if it preserves every split-form Ext table, which is all the
//! descent arguments use.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::brauer::BrauerClass;
use crate::bundles::{
    as_summand, check_split_semisimple_block, classify_exceptionality, ext_dims, is_rigid,
    summand_ext, BlockViolation, BundleError, Exceptionality, FormalBundle, Summand,
};
use crate::geometry::VarietyModel;

/// Closure of the generated group is abandoned past this many elements.
pub const GROUP_SIZE_CAP: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DescentError {
    #[error(transparent)]
    Bundle(#[from] BundleError),
    #[error("unknown summand label {0:?}")]
    UnknownLabel(String),
    #[error("labels {0:?} and {1:?} name the same summand")]
    DuplicateSummand(String, String),
    #[error("cannot parse cycle notation {0:?}")]
    CycleSyntax(String),
    #[error("label {0:?} appears twice in one generator")]
    RepeatedInCycle(String),
    #[error("generated group exceeds {GROUP_SIZE_CAP} elements")]
    GroupTooLarge,
    #[error("generator {generator} does not preserve Ext({from}, {to})")]
    InadmissibleAction {
        generator: usize,
        from: String,
        to: String,
    },
    #[error("label set is not closed under the action: {0:?} leaves it")]
    NotClosed(String),
    #[error("summand {0} of the bundle has no label")]
    UnlabeledSummand(String),
    #[error("bundle is not rigid: Ext^1(E, E) = {0}")]
    NotRigid(u64),
    #[error("multiplicity undetermined for the orbit of {0:?}")]
    MultiplicityUndetermined(String),
    #[error("orbit of {label:?}: multiplicity {d} is inconsistent with the endomorphism class (index {index})")]
    InconsistentMultiplicity { label: String, d: u64, index: u64 },
    #[error("not defined over k: {count} copies of {degree} are not divisible by {index}")]
    NotDefinedOverK { degree: String, count: u64, index: u64 },
    #[error("bundle is {0:?}; a separable exceptional bundle is required")]
    NotExceptional(Exceptionality),
    #[error("expected a single-factor Brauer-Severi model")]
    NotSingleFactor,
}

/// A permutation of labels, stored as a full map on the label set.
pub type Permutation = BTreeMap<String, String>;

/// Parse cycle notation such as `"(s1 s2)(s3 s4 s5)"`; `"()"` is the identity.
/// Labels may be separated by spaces or commas.
pub fn parse_cycles(text: &str) -> Result<Vec<Vec<String>>, DescentError> {
    let err = || DescentError::CycleSyntax(text.to_string());
    let mut cycles = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let body = rest.strip_prefix('(').ok_or_else(err)?;
        let close = body.find(')').ok_or_else(err)?;
        let cycle: Vec<String> = body[..close]
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(str::to_string)
            .collect();
        if !cycle.is_empty() {
            cycles.push(cycle);
        }
        rest = body[close + 1..].trim_start();
    }
    Ok(cycles)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaloisModel {
    x: VarietyModel,
    labels: BTreeMap<String, Summand>,
    generators: Vec<Permutation>,
    group_order: usize,
}

impl GaloisModel {
    /// `generators[g]` is the list of cycles of the `g`-th generator.
    pub fn new(
        x: VarietyModel,
        labels: BTreeMap<String, Summand>,
        generators: Vec<Vec<Vec<String>>>,
    ) -> Result<Self, DescentError> {
        let mut seen: BTreeMap<&Summand, &String> = BTreeMap::new();
        for (name, s) in &labels {
            x.check_degree(&s.degree).map_err(BundleError::from)?;
            if let Some(prev) = seen.insert(s, name) {
                return Err(DescentError::DuplicateSummand(prev.clone(), name.clone()));
            }
        }
        let mut perms = Vec::with_capacity(generators.len());
        for cycles in generators {
            let mut perm: Permutation = labels.keys().map(|l| (l.clone(), l.clone())).collect();
            let mut used = BTreeSet::new();
            for cycle in &cycles {
                for (k, label) in cycle.iter().enumerate() {
                    if !labels.contains_key(label) {
                        return Err(DescentError::UnknownLabel(label.clone()));
                    }
                    if !used.insert(label.clone()) {
                        return Err(DescentError::RepeatedInCycle(label.clone()));
                    }
                    perm.insert(label.clone(), cycle[(k + 1) % cycle.len()].clone());
                }
            }
            perms.push(perm);
        }
        let group_order = group_closure_size(labels.keys(), &perms)?;
        let model = Self {
            x,
            labels,
            generators: perms,
            group_order,
        };
        model.check_admissible()?;
        Ok(model)
    }

    /// The trivial action on the given labels.
    pub fn trivial(x: VarietyModel, labels: BTreeMap<String, Summand>) -> Result<Self, DescentError> {
        Self::new(x, labels, Vec::new())
    }

    fn check_admissible(&self) -> Result<(), DescentError> {
        for (g, perm) in self.generators.iter().enumerate() {
            for (a, s) in &self.labels {
                for (b, t) in &self.labels {
                    let ga = &self.labels[&perm[a]];
                    let gb = &self.labels[&perm[b]];
                    if summand_ext(&self.x, s, t) != summand_ext(&self.x, ga, gb) {
                        return Err(DescentError::InadmissibleAction {
                            generator: g,
                            from: a.clone(),
                            to: b.clone(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn variety(&self) -> &VarietyModel {
        &self.x
    }

    pub fn labels(&self) -> &BTreeMap<String, Summand> {
        &self.labels
    }

    pub fn summand(&self, label: &str) -> Result<&Summand, DescentError> {
        self.labels
            .get(label)
            .ok_or_else(|| DescentError::UnknownLabel(label.to_string()))
    }

    pub fn group_order(&self) -> usize {
        self.group_order
    }

    /// Label of a summand, matched exactly.
    pub fn label_of(&self, s: &Summand) -> Option<&str> {
        self.labels
            .iter()
            .find(|(_, t)| *t == s)
            .map(|(l, _)| l.as_str())
    }

    /// Image of a label set under one generator.
    pub fn apply(&self, generator: usize, set: &BTreeSet<String>) -> BTreeSet<String> {
        set.iter()
            .map(|l| self.generators[generator].get(l).cloned().unwrap_or_else(|| l.clone()))
            .collect()
    }

    pub fn is_invariant(&self, set: &BTreeSet<String>) -> bool {
        (0..self.generators.len()).all(|g| &self.apply(g, set) == set)
    }

    /// Partition of `labels` into orbits, ordered by least label.
    pub fn orbits(&self, labels: &BTreeSet<String>) -> Result<Vec<BTreeSet<String>>, DescentError> {
        for l in labels {
            if !self.labels.contains_key(l) {
                return Err(DescentError::UnknownLabel(l.clone()));
            }
        }
        let mut assigned: BTreeSet<&String> = BTreeSet::new();
        let mut out = Vec::new();
        for start in labels {
            if assigned.contains(start) {
                continue;
            }
            let mut orbit = BTreeSet::new();
            let mut queue = VecDeque::from([start.clone()]);
            while let Some(l) = queue.pop_front() {
                if !orbit.insert(l.clone()) {
                    continue;
                }
                for perm in &self.generators {
                    queue.push_back(perm[&l].clone());
                }
            }
            if let Some(out_of_set) = orbit.iter().find(|l| !labels.contains(*l)) {
                return Err(DescentError::NotClosed(out_of_set.clone()));
            }
            for l in labels.iter().filter(|l| orbit.contains(*l)) {
                assigned.insert(l);
            }
            out.push(orbit);
        }
        Ok(out)
    }
}

fn group_closure_size<'a>(
    labels: impl Iterator<Item = &'a String>,
    generators: &[Permutation],
) -> Result<usize, DescentError> {
    let order: Vec<&String> = labels.collect();
    let index: BTreeMap<&String, usize> = order.iter().enumerate().map(|(i, l)| (*l, i)).collect();
    let gens: Vec<Vec<usize>> = generators
        .iter()
        .map(|p| order.iter().map(|l| index[&p[*l]]).collect())
        .collect();
    let identity: Vec<usize> = (0..order.len()).collect();
    let mut elements = BTreeSet::from([identity.clone()]);
    let mut queue = VecDeque::from([identity]);
    while let Some(g) = queue.pop_front() {
        for h in &gens {
            let composed: Vec<usize> = g.iter().map(|&k| h[k]).collect();
            if elements.insert(composed.clone()) {
                if elements.len() > GROUP_SIZE_CAP {
                    return Err(DescentError::GroupTooLarge);
                }
                queue.push_back(composed);
            }
        }
    }
    Ok(elements.len())
}

/// Key under which an orbit's multiplicity or Brauer hint is looked up.
pub fn orbit_key(orbit: &BTreeSet<String>) -> String {
    format!("orbit_of_{}", orbit.iter().next().map(String::as_str).unwrap_or(""))
}

/// Externally supplied data for orbits, keyed by [`orbit_key`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OrbitData {
    pub multiplicities: BTreeMap<String, u64>,
    pub hints: BTreeMap<String, BrauerClass>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MultiplicitySource {
    /// Index of the Brauer class of the descended endomorphism algebra.
    BrauerHint,
    /// The orbit is a single AS-bundle, already defined over the base field.
    AsBundle,
    /// Supplied by the scene file.
    Scene,
}

/// A Galois orbit together with the multiplicity at which its sum descends.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DescentOrbit {
    pub members: BTreeSet<String>,
    pub multiplicity: u64,
    pub source: MultiplicitySource,
}

pub fn minimal_multiplicity(
    g: &GaloisModel,
    orbit: &BTreeSet<String>,
    hint: Option<&BrauerClass>,
    scene: Option<u64>,
) -> Result<DescentOrbit, DescentError> {
    let members = orbit.clone();
    if let Some(class) = hint {
        return Ok(DescentOrbit {
            members,
            multiplicity: class.index(),
            source: MultiplicitySource::BrauerHint,
        });
    }
    if orbit.len() == 1 {
        let s = g.summand(orbit.iter().next().expect("nonempty orbit"))?;
        if *s == as_summand(g.variety(), &s.degree)? {
            return Ok(DescentOrbit {
                members,
                multiplicity: 1,
                source: MultiplicitySource::AsBundle,
            });
        }
    }
    match scene {
        Some(d) if d >= 1 => Ok(DescentOrbit {
            members,
            multiplicity: d,
            source: MultiplicitySource::Scene,
        }),
        _ => Err(DescentError::MultiplicityUndetermined(
            orbit.iter().next().cloned().unwrap_or_default(),
        )),
    }
}

fn orbit_multiplicity(
    g: &GaloisModel,
    orbit: &BTreeSet<String>,
    data: &OrbitData,
) -> Result<DescentOrbit, DescentError> {
    let key = orbit_key(orbit);
    minimal_multiplicity(g, orbit, data.hints.get(&key), data.multiplicities.get(&key).copied())
}

/// Labels of the summands of `e`, with multiplicities.
fn labelled_summands(
    g: &GaloisModel,
    e: &FormalBundle,
) -> Result<BTreeMap<String, u64>, DescentError> {
    e.summands()
        .map(|(s, m)| {
            g.label_of(s)
                .map(|l| (l.to_string(), m))
                .ok_or_else(|| DescentError::UnlabeledSummand(s.to_string()))
        })
        .collect()
}

fn require_rigid(x: &VarietyModel, e: &FormalBundle) -> Result<(), DescentError> {
    if is_rigid(x, e) {
        Ok(())
    } else {
        Err(DescentError::NotRigid(ext_dims(x, e, e)[1]))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DescendedSummand {
    pub summand: Summand,
    pub multiplicity: u64,
    pub label: Exceptionality,
    pub orbit: DescentOrbit,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SingletonDescent {
    /// `E` is the direct sum of the listed weak exceptional bundles.
    Decomposition { summands: Vec<DescendedSummand> },
    /// Some orbit has more than one member; no conclusion is drawn.
    HypothesisNotMet { orbit: BTreeSet<String> },
}

/// Rigid bundle whose Galois orbits are all singletons: decompose it into
/// descended indecomposables with central division endomorphism algebras.
pub fn decompose_singleton_orbits(
    e: &FormalBundle,
    g: &GaloisModel,
    data: &OrbitData,
) -> Result<SingletonDescent, DescentError> {
    let x = g.variety();
    require_rigid(x, e)?;
    let labelled = labelled_summands(g, e)?;
    let orbits = g.orbits(&labelled.keys().cloned().collect())?;
    if let Some(orbit) = orbits.iter().find(|o| o.len() > 1) {
        return Ok(SingletonDescent::HypothesisNotMet {
            orbit: orbit.clone(),
        });
    }
    let mut out = Vec::with_capacity(orbits.len());
    for orbit in orbits {
        let label = orbit.iter().next().expect("nonempty orbit").clone();
        let s = g.summand(&label)?;
        let descent = orbit_multiplicity(g, &orbit, data)?;
        let d = descent.multiplicity;
        let class = data
            .hints
            .get(&orbit_key(&orbit))
            .cloned()
            .unwrap_or_else(|| s.end_class.clone());
        if class.index() != d * s.rank_multiplier {
            return Err(DescentError::InconsistentMultiplicity {
                label,
                d,
                index: class.index(),
            });
        }
        let count = labelled[&label];
        if count % d != 0 {
            return Err(DescentError::NotDefinedOverK {
                degree: s.degree.to_string(),
                count,
                index: d,
            });
        }
        let summand = Summand::new(s.degree.clone(), class);
        let kind = classify_exceptionality(x, &FormalBundle::single(summand.clone()));
        out.push(DescendedSummand {
            summand,
            multiplicity: count / d,
            label: kind,
            orbit: descent,
        });
    }
    Ok(SingletonDescent::Decomposition { summands: out })
}

/// Which block condition an orbit violates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitFailure {
    pub orbit: BTreeSet<String>,
    pub violation: BlockViolation,
}

/// Split-form line bundles of an orbit's members.
fn split_members(g: &GaloisModel, orbit: &BTreeSet<String>) -> Result<Vec<FormalBundle>, DescentError> {
    orbit
        .iter()
        .map(|l| Ok(FormalBundle::single(g.summand(l)?.split_line())))
        .collect()
}

/// First orbit whose members fail to form a split semisimple exceptional block
/// over the separable closure.
pub fn first_failing_orbit(
    g: &GaloisModel,
    orbits: &[BTreeSet<String>],
) -> Result<Option<OrbitFailure>, DescentError> {
    for orbit in orbits {
        let members = split_members(g, orbit)?;
        if let Err(violation) = check_split_semisimple_block(g.variety(), &members) {
            return Ok(Some(OrbitFailure {
                orbit: orbit.clone(),
                violation,
            }));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DescendedOrbitBundle {
    pub orbit: DescentOrbit,
    /// The minimal descent-orbit: every member with multiplicity `d`.
    pub bundle: FormalBundle,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeparableDescent {
    /// `E` is a direct sum of separable exceptional bundles.
    pub verdict: bool,
    pub failure: Option<OrbitFailure>,
    pub witness: Vec<DescendedOrbitBundle>,
}

/// Rigid `E` is a sum of separable exceptional bundles iff the minimal
/// descent-orbit of every Galois orbit of its summands is a split semisimple
/// exceptional block over the separable closure. The block predicate ignores
/// the multiplicity `d`, which only shapes the witness bundles.
pub fn check_separable_descent(
    e: &FormalBundle,
    g: &GaloisModel,
    data: &OrbitData,
) -> Result<SeparableDescent, DescentError> {
    require_rigid(g.variety(), e)?;
    let labelled = labelled_summands(g, e)?;
    let orbits = g.orbits(&labelled.keys().cloned().collect())?;
    if let Some(failure) = first_failing_orbit(g, &orbits)? {
        return Ok(SeparableDescent {
            verdict: false,
            failure: Some(failure),
            witness: Vec::new(),
        });
    }
    let mut witness = Vec::with_capacity(orbits.len());
    for orbit in &orbits {
        let descent = orbit_multiplicity(g, orbit, data)?;
        let bundle = FormalBundle::new(
            orbit
                .iter()
                .map(|l| Ok((g.summand(l)?.clone(), descent.multiplicity)))
                .collect::<Result<Vec<_>, DescentError>>()?,
        );
        witness.push(DescendedOrbitBundle {
            orbit: descent,
            bundle,
        });
    }
    Ok(SeparableDescent {
        verdict: true,
        failure: None,
        witness,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CollectionWitness {
    NotInvariant { block: usize },
    NotBlock { block: usize, violation: BlockViolation },
    NotSemiorthogonal {
        later_block: usize,
        earlier_block: usize,
        from: String,
        to: String,
        degree: usize,
        dim: u64,
    },
    K0Rank { members: usize, k0_rank: usize },
    OrbitNotContained { orbit: BTreeSet<String> },
    UnknownLabel { label: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Condition {
    pub passed: bool,
    pub witnesses: Vec<CollectionWitness>,
}

impl Condition {
    fn new(witnesses: Vec<CollectionWitness>) -> Self {
        Self {
            passed: witnesses.is_empty(),
            witnesses,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockCollectionReport {
    pub exceptionality: Exceptionality,
    pub invariant_blocks: Condition,
    pub split_blocks: Condition,
    pub semiorthogonal: Condition,
    pub k0_rank: Condition,
    /// Fullness is only checked through the rank of K₀.
    pub fullness: &'static str,
    pub orbits_contained: Condition,
    /// Galois orbits of each block: the induced separable exceptional
    /// collection over the base field, one semiorthogonal piece per block.
    pub induced_collection: Vec<Vec<BTreeSet<String>>>,
    pub verdict: bool,
}

/// A separable exceptional `E` lies in a full collection of Galois-invariant
/// split semisimple blocks on the split form.
pub fn check_invariant_blocks(
    e: &FormalBundle,
    g: &GaloisModel,
    full_collection: &[Vec<String>],
) -> Result<BlockCollectionReport, DescentError> {
    let x = g.variety();
    let label = classify_exceptionality(x, e);
    if !label.is_separable() {
        return Err(DescentError::NotExceptional(label));
    }
    let labelled = labelled_summands(g, e)?;
    let e_orbits = g.orbits(&labelled.keys().cloned().collect())?;

    let mut unknown = Vec::new();
    let blocks: Vec<BTreeSet<String>> = full_collection
        .iter()
        .map(|b| b.iter().cloned().collect())
        .collect();
    for l in blocks.iter().flatten() {
        if !g.labels().contains_key(l) {
            unknown.push(CollectionWitness::UnknownLabel { label: l.clone() });
        }
    }
    if !unknown.is_empty() {
        let failed = Condition::new(unknown);
        return Ok(BlockCollectionReport {
            exceptionality: label,
            invariant_blocks: failed.clone(),
            split_blocks: failed.clone(),
            semiorthogonal: failed.clone(),
            k0_rank: failed.clone(),
            fullness: "numerically inconsistent",
            orbits_contained: failed,
            induced_collection: Vec::new(),
            verdict: false,
        });
    }

    let invariant = Condition::new(
        blocks
            .iter()
            .enumerate()
            .filter(|(_, b)| !g.is_invariant(b))
            .map(|(block, _)| CollectionWitness::NotInvariant { block })
            .collect(),
    );

    let mut split = Vec::new();
    for (block, b) in blocks.iter().enumerate() {
        if let Err(violation) = check_split_semisimple_block(x, &split_members(g, b)?) {
            split.push(CollectionWitness::NotBlock { block, violation });
        }
    }
    let split = Condition::new(split);

    let mut semi = Vec::new();
    for (earlier, a) in blocks.iter().enumerate() {
        for (later, b) in blocks.iter().enumerate().skip(earlier + 1) {
            for from in b {
                for to in a {
                    let ext = ext_dims(
                        x,
                        &FormalBundle::single(g.summand(from)?.split_line()),
                        &FormalBundle::single(g.summand(to)?.split_line()),
                    );
                    if let Some((degree, &dim)) = ext.iter().enumerate().find(|(_, &v)| v != 0) {
                        semi.push(CollectionWitness::NotSemiorthogonal {
                            later_block: later,
                            earlier_block: earlier,
                            from: from.clone(),
                            to: to.clone(),
                            degree,
                            dim,
                        });
                    }
                }
            }
        }
    }
    let semi = Condition::new(semi);

    let members: usize = blocks.iter().map(BTreeSet::len).sum();
    let k0 = Condition::new(if members == x.k0_rank() {
        Vec::new()
    } else {
        vec![CollectionWitness::K0Rank {
            members,
            k0_rank: x.k0_rank(),
        }]
    });

    let contained = Condition::new(
        e_orbits
            .iter()
            .filter(|o| !blocks.iter().any(|b| o.is_subset(b)))
            .map(|o| CollectionWitness::OrbitNotContained { orbit: o.clone() })
            .collect(),
    );

    let mut induced = Vec::with_capacity(blocks.len());
    for b in &blocks {
        induced.push(g.orbits(b).unwrap_or_default());
    }

    let verdict =
        invariant.passed && split.passed && semi.passed && k0.passed && contained.passed;
    Ok(BlockCollectionReport {
        exceptionality: label,
        invariant_blocks: invariant,
        split_blocks: split,
        semiorthogonal: semi,
        fullness: if k0.passed {
            "numerically consistent"
        } else {
            "numerically inconsistent"
        },
        k0_rank: k0,
        orbits_contained: contained,
        induced_collection: induced,
        verdict,
    })
}

/// Group the split form of `E` on a single Brauer–Severi factor into copies of
/// the indecomposable AS-bundles `W_i`.
pub fn decompose_as_bundle(
    x: &VarietyModel,
    e: &FormalBundle,
) -> Result<Vec<(Summand, u64)>, DescentError> {
    if x.num_factors() != 1 {
        return Err(DescentError::NotSingleFactor);
    }
    let mut out = Vec::new();
    for (degree, count) in e.split_form() {
        x.check_degree(&degree).map_err(BundleError::from)?;
        let w = as_summand(x, &degree)?;
        let index = w.rank_multiplier;
        if count % index != 0 {
            return Err(DescentError::NotDefinedOverK {
                degree: degree.to_string(),
                count,
                index,
            });
        }
        out.push((w, count / index));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brauer::QuaternionSymbol;
    use crate::geometry::{Factor, MultiDegree};

    fn md(v: &[i64]) -> MultiDegree {
        MultiDegree(v.to_vec())
    }

    fn hamilton() -> BrauerClass {
        QuaternionSymbol::from_ints(-1, -1).unwrap().to_brauer()
    }

    fn curve() -> VarietyModel {
        VarietyModel::new(vec![Factor::brauer_severi(1, hamilton())]).unwrap()
    }

    fn labels(items: &[(&str, Summand)]) -> BTreeMap<String, Summand> {
        items.iter().map(|(l, s)| (l.to_string(), s.clone())).collect()
    }

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    fn swap(a: &str, b: &str) -> Vec<Vec<String>> {
        vec![vec![a.to_string(), b.to_string()]]
    }

    fn quadric_swap() -> GaloisModel {
        let q = VarietyModel::projective(&[1, 1]).unwrap();
        GaloisModel::new(
            q,
            labels(&[
                ("s1", Summand::line(md(&[1, 0]))),
                ("s2", Summand::line(md(&[0, 1]))),
                ("s3", Summand::line(md(&[0, 0]))),
            ]),
            vec![swap("s1", "s2")],
        )
        .unwrap()
    }

    #[test]
    fn cycle_parsing() {
        assert_eq!(
            parse_cycles("(a b)(c d e)").unwrap(),
            vec![vec!["a", "b"], vec!["c", "d", "e"]]
        );
        assert!(parse_cycles("()").unwrap().is_empty());
        assert!(parse_cycles("(a, b)").unwrap()[0].len() == 2);
        assert!(parse_cycles("a b").is_err());
        assert!(parse_cycles("(a b").is_err());
    }

    #[test]
    fn orbit_examples() {
        let p2 = VarietyModel::projective(&[2]).unwrap();
        let triv = GaloisModel::trivial(
            p2,
            labels(&[("s1", Summand::line(md(&[0]))), ("s2", Summand::line(md(&[1])))]),
        )
        .unwrap();
        assert_eq!(triv.orbits(&set(&["s1", "s2"])).unwrap(), vec![set(&["s1"]), set(&["s2"])]);
        assert_eq!(triv.group_order(), 1);

        let g = quadric_swap();
        assert_eq!(g.group_order(), 2);
        assert_eq!(g.orbits(&set(&["s1", "s2"])).unwrap(), vec![set(&["s1", "s2"])]);
        assert_eq!(
            g.orbits(&set(&["s1", "s2", "s3"])).unwrap(),
            vec![set(&["s1", "s2"]), set(&["s3"])]
        );
        assert_eq!(g.orbits(&set(&["s1"])), Err(DescentError::NotClosed("s2".into())));
        assert_eq!(g.orbits(&set(&["zz"])), Err(DescentError::UnknownLabel("zz".into())));
    }

    #[test]
    fn inadmissible_swap_rejected() {
        let p2 = VarietyModel::projective(&[2]).unwrap();
        let err = GaloisModel::new(
            p2,
            labels(&[("a", Summand::line(md(&[0]))), ("b", Summand::line(md(&[1])))]),
            vec![swap("a", "b")],
        );
        assert!(matches!(err, Err(DescentError::InadmissibleAction { .. })));
    }

    #[test]
    fn multiplicities() {
        let c = curve();
        let g = GaloisModel::trivial(
            c.clone(),
            labels(&[
                ("o1", Summand::line(md(&[1]))),
                ("w1", as_summand(&c, &md(&[1])).unwrap()),
            ]),
        )
        .unwrap();
        let d = minimal_multiplicity(&g, &set(&["o1"]), Some(&hamilton()), None).unwrap();
        assert_eq!((d.multiplicity, d.source), (2, MultiplicitySource::BrauerHint));
        let d = minimal_multiplicity(&g, &set(&["o1"]), Some(&BrauerClass::zero()), None).unwrap();
        assert_eq!(d.multiplicity, 1);
        let d = minimal_multiplicity(&g, &set(&["w1"]), None, None).unwrap();
        assert_eq!((d.multiplicity, d.source), (1, MultiplicitySource::AsBundle));
        assert_eq!(
            minimal_multiplicity(&g, &set(&["o1"]), None, None),
            Err(DescentError::MultiplicityUndetermined("o1".into()))
        );
        let q = quadric_swap();
        let d = minimal_multiplicity(&q, &set(&["s1", "s2"]), None, Some(1)).unwrap();
        assert_eq!((d.multiplicity, d.source), (1, MultiplicitySource::Scene));
    }

    #[test]
    fn singleton_orbit_decomposition() {
        let c = curve();
        let w = |i: i64| as_summand(&c, &md(&[i])).unwrap();
        let g = GaloisModel::trivial(c.clone(), labels(&[("w1", w(1)), ("w2", w(2))])).unwrap();
        let e = FormalBundle::new([(w(1), 2), (w(2), 1)]);
        let SingletonDescent::Decomposition { summands } =
            decompose_singleton_orbits(&e, &g, &OrbitData::default()).unwrap()
        else {
            panic!("expected a decomposition");
        };
        assert_eq!(summands.len(), 2);
        assert_eq!(summands[0].summand, w(1));
        assert_eq!(summands[0].multiplicity, 2);
        assert_eq!(summands[0].label, Exceptionality::WeakExceptional);
        assert_eq!(summands[1].label, Exceptionality::Exceptional);

        // split-form O(1)^4 on the curve with the class supplied as a hint
        let g = GaloisModel::trivial(c.clone(), labels(&[("o1", Summand::line(md(&[1])))])).unwrap();
        let mut data = OrbitData::default();
        data.hints.insert("orbit_of_o1".into(), hamilton());
        let e = FormalBundle::new([(Summand::line(md(&[1])), 4)]);
        let SingletonDescent::Decomposition { summands } = decompose_singleton_orbits(&e, &g, &data).unwrap() else {
            panic!("expected a decomposition");
        };
        assert_eq!(summands[0].summand, w(1));
        assert_eq!(summands[0].multiplicity, 2);
        let e3 = FormalBundle::new([(Summand::line(md(&[1])), 3)]);
        assert!(matches!(
            decompose_singleton_orbits(&e3, &g, &data),
            Err(DescentError::NotDefinedOverK { .. })
        ));

        let q = quadric_swap();
        let e = FormalBundle::new([(Summand::line(md(&[1, 0])), 1), (Summand::line(md(&[0, 1])), 1)]);
        assert_eq!(
            decompose_singleton_orbits(&e, &q, &OrbitData::default()).unwrap(),
            SingletonDescent::HypothesisNotMet {
                orbit: set(&["s1", "s2"])
            }
        );

        let p1 = VarietyModel::projective(&[1]).unwrap();
        let g = GaloisModel::trivial(
            p1,
            labels(&[("a", Summand::line(md(&[0]))), ("b", Summand::line(md(&[2])))]),
        )
        .unwrap();
        let e = FormalBundle::new([(Summand::line(md(&[0])), 1), (Summand::line(md(&[2])), 1)]);
        assert_eq!(decompose_singleton_orbits(&e, &g, &OrbitData::default()), Err(DescentError::NotRigid(1)));
    }

    #[test]
    fn separable_descent_cases() {
        let c = curve();
        let w = |i: i64| as_summand(&c, &md(&[i])).unwrap();
        let g = GaloisModel::trivial(c.clone(), labels(&[("w1", w(1)), ("w2", w(2))])).unwrap();
        let e = FormalBundle::new([(w(1), 1), (w(2), 1)]);
        let r = check_separable_descent(&e, &g, &OrbitData::default()).unwrap();
        assert!(r.verdict);
        assert_eq!(r.witness.len(), 2);

        let p2 = VarietyModel::projective(&[2]).unwrap();
        let g = GaloisModel::trivial(p2, labels(&[("o", Summand::line(md(&[0])))])).unwrap();
        let r = check_separable_descent(&FormalBundle::line(md(&[0])).repeat(5), &g, &OrbitData::default())
            .unwrap();
        assert!(r.verdict);
        assert_eq!(r.witness.len(), 1);

        // swapped pair with Ext¹ between the members
        let q = VarietyModel::projective(&[1, 1]).unwrap();
        let g = GaloisModel::new(
            q,
            labels(&[("a", Summand::line(md(&[1, -1]))), ("b", Summand::line(md(&[-1, 1])))]),
            vec![swap("a", "b")],
        )
        .unwrap();
        let failure = first_failing_orbit(&g, &[set(&["a", "b"])]).unwrap().unwrap();
        assert_eq!(
            failure.violation,
            BlockViolation::CrossExt {
                from: 0,
                to: 1,
                degree: 1,
                dim: 3
            }
        );
        let e = FormalBundle::new([(Summand::line(md(&[1, -1])), 1), (Summand::line(md(&[-1, 1])), 1)]);
        assert_eq!(check_separable_descent(&e, &g, &OrbitData::default()), Err(DescentError::NotRigid(6)));
    }

    #[test]
    fn invariant_block_cases() {
        let p2 = VarietyModel::projective(&[2]).unwrap();
        let g = GaloisModel::trivial(
            p2,
            labels(&[
                ("o0", Summand::line(md(&[0]))),
                ("o1", Summand::line(md(&[1]))),
                ("o2", Summand::line(md(&[2]))),
            ]),
        )
        .unwrap();
        let blocks = |names: &[&str]| -> Vec<Vec<String>> {
            names.iter().map(|n| vec![n.to_string()]).collect()
        };
        let e = FormalBundle::line(md(&[1]));
        let r = check_invariant_blocks(&e, &g, &blocks(&["o0", "o1", "o2"])).unwrap();
        assert!(r.verdict);
        assert_eq!(r.induced_collection.len(), 3);
        let r = check_invariant_blocks(&e, &g, &blocks(&["o1", "o0", "o2"])).unwrap();
        assert!(!r.verdict);
        assert!(r.semiorthogonal.witnesses.contains(&CollectionWitness::NotSemiorthogonal {
            later_block: 1,
            earlier_block: 0,
            from: "o0".into(),
            to: "o1".into(),
            degree: 0,
            dim: 3
        }));
        let r = check_invariant_blocks(&e, &g, &blocks(&["o0", "o2"])).unwrap();
        assert!(!r.orbits_contained.passed && !r.k0_rank.passed);
        let not_exc = FormalBundle::line(md(&[0])).direct_sum(&FormalBundle::line(md(&[1])));
        assert_eq!(
            check_invariant_blocks(&not_exc, &g, &blocks(&["o0", "o1", "o2"])),
            Err(DescentError::NotExceptional(Exceptionality::None))
        );

        let c = curve();
        let g = GaloisModel::trivial(
            c.clone(),
            labels(&[("o", Summand::line(md(&[0]))), ("w1", as_summand(&c, &md(&[1])).unwrap())]),
        )
        .unwrap();
        let e = FormalBundle::single(as_summand(&c, &md(&[1])).unwrap());
        assert!(check_invariant_blocks(&e, &g, &blocks(&["o", "w1"])).unwrap().verdict);
    }

    #[test]
    fn as_decomposition() {
        let c = curve();
        let w1 = as_summand(&c, &md(&[1])).unwrap();
        let e = FormalBundle::new([(Summand::line(md(&[1])), 4)]);
        assert_eq!(decompose_as_bundle(&c, &e).unwrap(), vec![(w1, 2)]);
        let e = FormalBundle::new([(Summand::line(md(&[0])), 3)]);
        assert_eq!(decompose_as_bundle(&c, &e).unwrap(), vec![(Summand::line(md(&[0])), 3)]);
        let e = FormalBundle::new([(Summand::line(md(&[1])), 3)]);
        assert!(matches!(
            decompose_as_bundle(&c, &e),
            Err(DescentError::NotDefinedOverK { count: 3, index: 2, .. })
        ));
        let q = VarietyModel::projective(&[1, 1]).unwrap();
        assert_eq!(decompose_as_bundle(&q, &FormalBundle::zero()), Err(DescentError::NotSingleFactor));
    }
}

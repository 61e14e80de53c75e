//! Scene files: one JSON document describing a variety, named bundles, and
//! optional helix and Galois data. Parsing is strict; every diagnostic carries
//! a path to the offending field.

use std::collections::BTreeMap;
use std::fmt;

use serde::Deserialize;

use crate::brauer::{BrauerClass, QuaternionSymbol};
use crate::bundles::{as_summand, FormalBundle, Summand};
use crate::descent::{parse_cycles, GaloisModel, OrbitData};
use crate::geometry::{Factor, MultiDegree, VarietyModel};
use crate::helix::{HelixSpec, Strictness};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SceneError {
    pub path: String,
    pub message: String,
}

impl SceneError {
    fn at(path: impl Into<String>, message: impl fmt::Display) -> Self {
        Self {
            path: path.into(),
            message: message.to_string(),
        }
    }
}

impl fmt::Display for SceneError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() || self.path == "." {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for SceneError {}

/// A Brauer class written either as local invariants or as a quaternion
/// symbol `{"a": "-1", "b": "-1"}`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum ClassRepr {
    Quaternion(QuaternionSymbol),
    Class(BrauerClass),
}

impl ClassRepr {
    fn into_class(self) -> BrauerClass {
        match self {
            ClassRepr::Quaternion(q) => q.to_brauer(),
            ClassRepr::Class(c) => c,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FactorRepr {
    dim: u32,
    #[serde(default)]
    twist: Option<ClassRepr>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct VarietyRepr {
    factors: Vec<FactorRepr>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum TwistIndex {
    Single(i64),
    Multi(Vec<i64>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SummandRepr {
    degree: Vec<i64>,
    #[serde(default = "one")]
    mult: u64,
    #[serde(default)]
    twist_index: Option<TwistIndex>,
}

fn one() -> u64 {
    1
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LabelRepr {
    degree: Vec<i64>,
    #[serde(default)]
    twist_index: Option<TwistIndex>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BundleRepr {
    summands: Vec<SummandRepr>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum BundleRef {
    Name(String),
    Literal(BundleRepr),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct HelixRepr {
    thread: Vec<BundleRef>,
    #[serde(default)]
    d: Option<u32>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GaloisRepr {
    labels: BTreeMap<String, LabelRepr>,
    #[serde(default)]
    generators: Vec<Vec<String>>,
    #[serde(default)]
    bundle: Option<BundleRef>,
    #[serde(default)]
    full_collection: Option<Vec<Vec<String>>>,
    #[serde(default)]
    multiplicities: BTreeMap<String, u64>,
    #[serde(default)]
    hints: BTreeMap<String, ClassRepr>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OptionsRepr {
    #[serde(default)]
    window: Option<usize>,
    #[serde(default, rename = "L")]
    l: Option<u32>,
    #[serde(default)]
    strictness: Option<Strictness>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneRepr {
    variety: VarietyRepr,
    #[serde(default)]
    bundles: BTreeMap<String, BundleRepr>,
    #[serde(default)]
    collection: Option<Vec<String>>,
    #[serde(default)]
    helix: Option<HelixRepr>,
    #[serde(default)]
    galois: Option<GaloisRepr>,
    #[serde(default)]
    options: OptionsRepr,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SceneOptions {
    pub window: Option<usize>,
    pub l: Option<u32>,
    pub strictness: Strictness,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaloisScene {
    pub model: GaloisModel,
    pub bundle: Option<FormalBundle>,
    pub full_collection: Option<Vec<Vec<String>>>,
    pub data: OrbitData,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scene {
    pub variety: VarietyModel,
    pub bundles: BTreeMap<String, FormalBundle>,
    pub collection: Option<Vec<String>>,
    pub helix: Option<HelixSpec>,
    pub galois: Option<GaloisScene>,
    pub options: SceneOptions,
}

impl Scene {
    pub fn parse(text: &str) -> Result<Self, SceneError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let repr: SceneRepr = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            SceneError::at(path, e.into_inner())
        })?;
        Self::resolve(repr)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, SceneError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SceneError::at("", format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Resolve bundle names, in order.
    pub fn named(&self, names: &[String], path: &str) -> Result<Vec<FormalBundle>, SceneError> {
        names
            .iter()
            .enumerate()
            .map(|(k, name)| {
                self.bundles
                    .get(name)
                    .cloned()
                    .ok_or_else(|| SceneError::at(format!("{path}[{k}]"), format!("unknown bundle {name:?}")))
            })
            .collect()
    }

    fn resolve(repr: SceneRepr) -> Result<Self, SceneError> {
        let factors = repr
            .variety
            .factors
            .into_iter()
            .map(|f| Factor::brauer_severi(f.dim, f.twist.map(ClassRepr::into_class).unwrap_or_default()))
            .collect();
        let x = VarietyModel::new(factors).map_err(|e| SceneError::at("variety.factors", e))?;

        let mut bundles = BTreeMap::new();
        for (name, b) in repr.bundles {
            let path = format!("bundles.{name}");
            bundles.insert(name, resolve_bundle(&x, b, &path)?);
        }

        let mut scene = Scene {
            variety: x.clone(),
            bundles,
            collection: None,
            helix: None,
            galois: None,
            options: SceneOptions {
                window: repr.options.window,
                l: repr.options.l,
                strictness: repr.options.strictness.unwrap_or_default(),
            },
        };

        if let Some(names) = repr.collection {
            scene.named(&names, "collection")?;
            scene.collection = Some(names);
        }

        if let Some(h) = repr.helix {
            let mut thread = Vec::with_capacity(h.thread.len());
            for (k, r) in h.thread.into_iter().enumerate() {
                thread.push(scene.bundle_ref(r, &format!("helix.thread[{k}]"))?);
            }
            let d = h.d.unwrap_or(x.dim() as u32 + 1);
            scene.helix =
                Some(HelixSpec::new(x.clone(), thread, d).map_err(|e| SceneError::at("helix", e))?);
        }

        if let Some(g) = repr.galois {
            let mut labels = BTreeMap::new();
            for (name, l) in g.labels {
                let path = format!("galois.labels.{name}");
                let s = resolve_summand(&x, l.degree, l.twist_index, &path)?;
                labels.insert(name, s);
            }
            let mut generators = Vec::with_capacity(g.generators.len());
            for (k, cycles) in g.generators.iter().enumerate() {
                let mut all = Vec::new();
                for (c, text) in cycles.iter().enumerate() {
                    let parsed = parse_cycles(text)
                        .map_err(|e| SceneError::at(format!("galois.generators[{k}][{c}]"), e))?;
                    all.extend(parsed);
                }
                generators.push(all);
            }
            let model = GaloisModel::new(x.clone(), labels, generators)
                .map_err(|e| SceneError::at("galois", e))?;
            let bundle = g
                .bundle
                .map(|r| scene.bundle_ref(r, "galois.bundle"))
                .transpose()?;
            if let Some(blocks) = &g.full_collection {
                for (b, block) in blocks.iter().enumerate() {
                    for (k, label) in block.iter().enumerate() {
                        if !model.labels().contains_key(label) {
                            return Err(SceneError::at(
                                format!("galois.full_collection[{b}][{k}]"),
                                format!("unknown label {label:?}"),
                            ));
                        }
                    }
                }
            }
            let hints = g
                .hints
                .into_iter()
                .map(|(k, c)| (k, c.into_class()))
                .collect();
            scene.galois = Some(GaloisScene {
                model,
                bundle,
                full_collection: g.full_collection,
                data: OrbitData {
                    multiplicities: g.multiplicities,
                    hints,
                },
            });
        }
        Ok(scene)
    }

    fn bundle_ref(&self, r: BundleRef, path: &str) -> Result<FormalBundle, SceneError> {
        match r {
            BundleRef::Name(name) => self
                .bundles
                .get(&name)
                .cloned()
                .ok_or_else(|| SceneError::at(path, format!("unknown bundle {name:?}"))),
            BundleRef::Literal(b) => resolve_bundle(&self.variety, b, path),
        }
    }
}

fn resolve_bundle(x: &VarietyModel, b: BundleRepr, path: &str) -> Result<FormalBundle, SceneError> {
    let mut items = Vec::with_capacity(b.summands.len());
    for (k, s) in b.summands.into_iter().enumerate() {
        let spath = format!("{path}.summands[{k}]");
        if s.mult == 0 {
            return Err(SceneError::at(format!("{spath}.mult"), "multiplicity must be positive"));
        }
        items.push((resolve_summand(x, s.degree, s.twist_index, &spath)?, s.mult));
    }
    Ok(FormalBundle::new(items))
}

/// With `twist_index` the summand is the indecomposable AS-bundle of that
/// degree; without it, the line bundle of the split form.
fn resolve_summand(
    x: &VarietyModel,
    degree: Vec<i64>,
    twist_index: Option<TwistIndex>,
    path: &str,
) -> Result<Summand, SceneError> {
    let degree = MultiDegree(degree);
    x.check_degree(&degree)
        .map_err(|e| SceneError::at(format!("{path}.degree"), e))?;
    let Some(index) = twist_index else {
        return Ok(Summand::line(degree));
    };
    let consistent = match &index {
        TwistIndex::Multi(v) => *v == degree.0,
        TwistIndex::Single(i) => {
            let f = x.factors().iter().position(Factor::is_twisted).unwrap_or(0);
            degree.0[f] == *i
        }
    };
    if !consistent {
        return Err(SceneError::at(
            format!("{path}.twist_index"),
            format!("does not match degree {degree}"),
        ));
    }
    as_summand(x, &degree).map_err(|e| SceneError::at(path, e))
}

//! Command-line surface. [`run`] performs a command and returns its exit code
//! and output; the binary only prints them.
//!
//! Exit codes: 0 affirmative, 1 negative verdict or failed check, 2 parse or
//! validation error, 3 hypothesis not met or multiplicity undetermined.

use std::collections::BTreeSet;
use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::brauer::{parse_rational, BrauerClass, QuaternionSymbol};
use crate::bundles::{classify_exceptionality, ext_dims, Exceptionality, FormalBundle};
use crate::descent::{
    check_invariant_blocks, check_separable_descent, decompose_as_bundle,
    decompose_singleton_orbits, DescentError, SingletonDescent,
};
use crate::helix::{
    check_tilting_hypothesis, rolled_up_quiver, verify_geometric, verify_whelix, HelixError,
    HelixSpec, Strictness,
};
use crate::scene::{GaloisScene, Scene, SceneError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_UNDETERMINED: i32 = 3;

pub const DEFAULT_L: u32 = 10;

#[derive(Debug, Parser)]
#[command(name = "fano-helix", version, about = "Exceptional collections, helices and Galois descent on Brauer-Severi products")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// Scene file (JSON).
    #[arg(long, global = true)]
    pub scene: Option<PathBuf>,
    /// Helix window; defaults to three times the thread length.
    #[arg(long, global = true)]
    pub window: Option<usize>,
    /// Largest power of the anticanonical twist checked by `helix tilting`.
    #[arg(long = "L", global = true)]
    pub l: Option<u32>,
    /// Write the rolled-up quiver in DOT format to this path.
    #[arg(long, global = true)]
    pub dot: Option<PathBuf>,
    /// Emit JSON reports (`--json false` for a one-line summary).
    #[arg(long, global = true, action = ArgAction::Set, num_args = 0..=1,
          default_value_t = true, default_missing_value = "true")]
    pub json: bool,
    /// Accepted for symmetry with the test harness; every command is deterministic.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that named bundles form a strong, full weak exceptional collection.
    CheckCollection {
        /// Bundle names in order; defaults to the scene's `collection`.
        names: Vec<String>,
    },
    /// Helix verification, rolled-up quiver and tilting hypothesis.
    Helix {
        #[command(subcommand)]
        command: HelixCommand,
    },
    /// Galois orbits and descent criteria.
    Descent {
        #[command(subcommand)]
        command: DescentCommand,
        /// Bundle name from the scene; defaults to the `galois.bundle` entry.
        #[arg(long, global = true)]
        bundle: Option<String>,
    },
    /// Brauer classes of quaternion algebras over the rationals.
    Brauer {
        #[command(subcommand)]
        command: BrauerCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum HelixCommand {
    Verify,
    Quiver,
    Tilting {
        /// Offset `k` of the thread `(V_{k+1}, ..., V_{k+n})`.
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        thread_index: i64,
    },
}

#[derive(Debug, Subcommand)]
pub enum DescentCommand {
    /// Galois orbits of the bundle's summands (all labels without a bundle).
    Orbits,
    /// Is the rigid bundle a sum of separable exceptional bundles?
    Thm612,
    /// Does the separable exceptional bundle sit in a full invariant block collection?
    Thm613,
    /// Decompose a rigid bundle whose orbits are singletons.
    Thm614,
    /// Decompose a bundle on a Brauer-Severi variety into AS-bundles.
    Asdecomp,
}

#[derive(Debug, Subcommand)]
pub enum BrauerCommand {
    /// Class of the quaternion algebra (a, b).
    Class {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// Index of a class given as `a,b`, a JSON class, or `0`.
    Index {
        #[arg(allow_hyphen_values = true)]
        class: String,
    },
    /// Tensor product of two classes.
    Tensor {
        #[arg(allow_hyphen_values = true)]
        left: String,
        #[arg(allow_hyphen_values = true)]
        right: String,
    },
}

/// Result of one command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn report<T: Serialize>(code: i32, value: &T, summary: String, json_on: bool) -> Self {
        let stdout = if json_on {
            let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
            s.push('\n');
            s
        } else {
            summary + "\n"
        };
        Self {
            code,
            stdout,
            stderr: String::new(),
        }
    }

    fn error(code: i32, status: &str, message: String, path: Option<&str>, json_on: bool) -> Self {
        let mut value = json!({ "status": status, "message": message });
        if let Some(p) = path.filter(|p| !p.is_empty()) {
            value["path"] = json!(p);
        }
        let mut out = Self::report(code, &value, format!("{status}: {message}"), json_on);
        if json_on {
            out.stderr = format!("{status}: {message}\n");
        }
        out
    }

    fn invalid(message: impl ToString, json_on: bool) -> Self {
        Self::error(EXIT_INVALID, "invalid", message.to_string(), None, json_on)
    }

    fn scene_error(e: SceneError, json_on: bool) -> Self {
        Self::error(EXIT_INVALID, "invalid", e.message, Some(&e.path), json_on)
    }
}

fn verdict_word(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

pub fn run(cli: &Cli) -> Outcome {
    let g = &cli.global;
    match &cli.command {
        Command::Brauer { command } => run_brauer(command, g.json),
        Command::CheckCollection { names } => with_scene(g, |s| check_collection(s, names, g.json)),
        Command::Helix { command } => with_scene(g, |s| run_helix(s, command, g)),
        Command::Descent { command, bundle } => {
            with_scene(g, |s| run_descent(s, command, bundle.as_deref(), g.json))
        }
    }
}

fn with_scene(g: &GlobalArgs, f: impl FnOnce(&Scene) -> Outcome) -> Outcome {
    let Some(path) = &g.scene else {
        return Outcome::invalid("--scene is required", g.json);
    };
    match Scene::load(path) {
        Ok(scene) => f(&scene),
        Err(e) => Outcome::scene_error(e, g.json),
    }
}

#[derive(Serialize)]
struct MemberReport<'a> {
    name: &'a str,
    exceptionality: Exceptionality,
    accepted: bool,
}

#[derive(Serialize)]
struct PairWitness<'a> {
    from: &'a str,
    to: &'a str,
    degree: usize,
    dim: u64,
}

#[derive(Serialize)]
struct PairCheck<'a> {
    passed: bool,
    witnesses: Vec<PairWitness<'a>>,
}

#[derive(Serialize)]
struct FullnessReport {
    passed: bool,
    members: usize,
    k0_rank: usize,
    /// Only the rank of K₀ is compared; generation is not decided.
    status: &'static str,
}

#[derive(Serialize)]
struct CollectionReport<'a> {
    collection: &'a [String],
    strictness: Strictness,
    members: Vec<MemberReport<'a>>,
    exceptional: bool,
    semiorthogonal: PairCheck<'a>,
    strong: PairCheck<'a>,
    full: FullnessReport,
    passed: bool,
}

fn check_collection(scene: &Scene, names: &[String], json_on: bool) -> Outcome {
    let (names, path) = if names.is_empty() {
        match &scene.collection {
            Some(c) => (c.as_slice(), "collection"),
            None => return Outcome::invalid("no collection given on the command line or in the scene", json_on),
        }
    } else {
        (names, "arguments")
    };
    let bundles = match scene.named(names, path) {
        Ok(b) => b,
        Err(e) => return Outcome::scene_error(e, json_on),
    };
    let x = &scene.variety;
    let strictness = scene.options.strictness;
    let members: Vec<MemberReport> = names
        .iter()
        .zip(&bundles)
        .map(|(name, e)| {
            let label = classify_exceptionality(x, e);
            MemberReport {
                name,
                exceptionality: label,
                accepted: strictness.accepts(label),
            }
        })
        .collect();
    let exceptional = members.iter().all(|m| m.accepted);

    let mut semi = Vec::new();
    let mut strong = Vec::new();
    for i in 0..bundles.len() {
        for j in i + 1..bundles.len() {
            for (degree, &dim) in ext_dims(x, &bundles[j], &bundles[i]).iter().enumerate() {
                if dim != 0 {
                    semi.push(PairWitness {
                        from: &names[j],
                        to: &names[i],
                        degree,
                        dim,
                    });
                }
            }
            for (degree, &dim) in ext_dims(x, &bundles[i], &bundles[j]).iter().enumerate().skip(1) {
                if dim != 0 {
                    strong.push(PairWitness {
                        from: &names[i],
                        to: &names[j],
                        degree,
                        dim,
                    });
                }
            }
        }
    }
    let full_ok = bundles.len() == x.k0_rank();
    let report = CollectionReport {
        collection: names,
        strictness,
        exceptional,
        semiorthogonal: PairCheck {
            passed: semi.is_empty(),
            witnesses: semi,
        },
        strong: PairCheck {
            passed: strong.is_empty(),
            witnesses: strong,
        },
        full: FullnessReport {
            passed: full_ok,
            members: bundles.len(),
            k0_rank: x.k0_rank(),
            status: if full_ok {
                "numerically consistent"
            } else {
                "numerically inconsistent"
            },
        },
        passed: false,
        members,
    };
    let passed = report.exceptional
        && report.semiorthogonal.passed
        && report.strong.passed
        && report.full.passed;
    let report = CollectionReport { passed, ..report };
    let summary = format!(
        "check-collection: {} (exceptional {}, semiorthogonal {}, strong {}, full {})",
        verdict_word(passed),
        report.exceptional,
        report.semiorthogonal.passed,
        report.strong.passed,
        report.full.passed
    );
    Outcome::report(if passed { EXIT_OK } else { EXIT_FAILED }, &report, summary, json_on)
}

fn helix_error(e: HelixError, json_on: bool) -> Outcome {
    match e {
        HelixError::NotGeometric => Outcome::error(EXIT_FAILED, "negative", e.to_string(), None, json_on),
        other => Outcome::invalid(other, json_on),
    }
}

fn run_helix(scene: &Scene, command: &HelixCommand, g: &GlobalArgs) -> Outcome {
    let Some(h) = &scene.helix else {
        return Outcome::error(EXIT_INVALID, "invalid", "scene has no helix section".into(), Some("helix"), g.json);
    };
    let window = g.window.or(scene.options.window).unwrap_or_else(|| h.default_window());
    match command {
        HelixCommand::Verify => helix_verify(h, window, scene.options.strictness, g.json),
        HelixCommand::Quiver => helix_quiver(h, window, g),
        HelixCommand::Tilting { thread_index } => {
            let l = g.l.or(scene.options.l).unwrap_or(DEFAULT_L);
            match check_tilting_hypothesis(h, *thread_index, l) {
                Ok(r) => {
                    let summary = format!(
                        "helix tilting: {} (L = {}, threshold {})",
                        verdict_word(r.passed),
                        l,
                        r.threshold_l.map_or("none".to_string(), |t| t.to_string())
                    );
                    Outcome::report(if r.passed { EXIT_OK } else { EXIT_FAILED }, &r, summary, g.json)
                }
                Err(e) => helix_error(e, g.json),
            }
        }
    }
}

fn helix_verify(h: &HelixSpec, window: usize, strictness: Strictness, json_on: bool) -> Outcome {
    let whelix = match verify_whelix(h, window, strictness) {
        Ok(r) => r,
        Err(e) => return helix_error(e, json_on),
    };
    let geometric = match verify_geometric(h, window) {
        Ok(r) => r,
        Err(e) => return helix_error(e, json_on),
    };
    let passed = whelix.passed;
    let summary = format!(
        "helix verify: {} (type ({}, {}), geometric {})",
        verdict_word(passed),
        h.n(),
        h.d(),
        geometric.passed
    );
    let value = json!({
        "type": [h.n(), h.d()],
        "whelix": whelix,
        "geometric": geometric,
        "passed": passed,
    });
    Outcome::report(if passed { EXIT_OK } else { EXIT_FAILED }, &value, summary, json_on)
}

fn helix_quiver(h: &HelixSpec, window: usize, g: &GlobalArgs) -> Outcome {
    let quiver = match rolled_up_quiver(h, window) {
        Ok(q) => q,
        Err(e) => return helix_error(e, g.json),
    };
    let dot = quiver.to_dot();
    if let Some(path) = &g.dot {
        if let Err(e) = std::fs::write(path, &dot) {
            return Outcome::invalid(format!("cannot write {}: {e}", path.display()), g.json);
        }
    }
    if g.json {
        Outcome::report(EXIT_OK, &quiver, String::new(), true)
    } else {
        Outcome {
            code: EXIT_OK,
            stdout: dot,
            stderr: String::new(),
        }
    }
}

fn descent_error(e: DescentError, json_on: bool) -> Outcome {
    match e {
        DescentError::MultiplicityUndetermined(_) => {
            Outcome::error(EXIT_UNDETERMINED, "multiplicity_undetermined", e.to_string(), None, json_on)
        }
        DescentError::NotRigid(_) | DescentError::NotExceptional(_) => {
            Outcome::error(EXIT_UNDETERMINED, "hypothesis_not_met", e.to_string(), None, json_on)
        }
        DescentError::NotDefinedOverK { .. } => {
            Outcome::error(EXIT_FAILED, "negative", e.to_string(), None, json_on)
        }
        other => Outcome::invalid(other, json_on),
    }
}

fn descent_bundle(scene: &Scene, name: Option<&str>) -> Result<FormalBundle, SceneError> {
    match name {
        Some(n) => Ok(scene.named(&[n.to_string()], "--bundle")?.remove(0)),
        None => scene
            .galois
            .as_ref()
            .and_then(|g| g.bundle.clone())
            .ok_or(SceneError {
                path: "galois.bundle".into(),
                message: "no bundle given".into(),
            }),
    }
}

fn galois_section(scene: &Scene) -> Result<&GaloisScene, SceneError> {
    scene.galois.as_ref().ok_or(SceneError {
        path: "galois".into(),
        message: "scene has no galois section".into(),
    })
}

fn run_descent(scene: &Scene, command: &DescentCommand, bundle: Option<&str>, json_on: bool) -> Outcome {
    if let DescentCommand::Asdecomp = command {
        let e = match descent_bundle(scene, bundle) {
            Ok(e) => e,
            Err(err) => return Outcome::scene_error(err, json_on),
        };
        return match decompose_as_bundle(&scene.variety, &e) {
            Ok(parts) => {
                let summands: Vec<Value> = parts
                    .iter()
                    .map(|(s, m)| json!({ "summand": s, "mult": m, "label": s.to_string() }))
                    .collect();
                let summary = format!(
                    "descent asdecomp: {}",
                    parts
                        .iter()
                        .map(|(s, m)| format!("{s}^{m}"))
                        .collect::<Vec<_>>()
                        .join(" + ")
                );
                Outcome::report(EXIT_OK, &json!({ "verdict": true, "summands": summands }), summary, json_on)
            }
            Err(err) => descent_error(err, json_on),
        };
    }
    let galois = match galois_section(scene) {
        Ok(g) => g,
        Err(err) => return Outcome::scene_error(err, json_on),
    };
    let model = &galois.model;
    if let DescentCommand::Orbits = command {
        let labels: BTreeSet<String> = match descent_bundle(scene, bundle) {
            Ok(e) => {
                let mut set = BTreeSet::new();
                for (s, _) in e.summands() {
                    match model.label_of(s) {
                        Some(l) => {
                            set.insert(l.to_string());
                        }
                        None => return descent_error(DescentError::UnlabeledSummand(s.to_string()), json_on),
                    }
                }
                set
            }
            Err(_) if bundle.is_none() => model.labels().keys().cloned().collect(),
            Err(err) => return Outcome::scene_error(err, json_on),
        };
        return match model.orbits(&labels) {
            Ok(orbits) => {
                let summary = format!("descent orbits: {orbits:?}");
                let value = json!({ "group_order": model.group_order(), "orbits": orbits });
                Outcome::report(EXIT_OK, &value, summary, json_on)
            }
            Err(err) => descent_error(err, json_on),
        };
    }
    let e = match descent_bundle(scene, bundle) {
        Ok(e) => e,
        Err(err) => return Outcome::scene_error(err, json_on),
    };
    match command {
        DescentCommand::Thm612 => match check_separable_descent(&e, model, &galois.data) {
            Ok(r) => {
                let summary = format!("descent thm612: {}", r.verdict);
                Outcome::report(if r.verdict { EXIT_OK } else { EXIT_FAILED }, &r, summary, json_on)
            }
            Err(err) => descent_error(err, json_on),
        },
        DescentCommand::Thm613 => {
            let Some(blocks) = &galois.full_collection else {
                return Outcome::scene_error(
                    SceneError {
                        path: "galois.full_collection".into(),
                        message: "no full collection given".into(),
                    },
                    json_on,
                );
            };
            match check_invariant_blocks(&e, model, blocks) {
                Ok(r) => {
                    let summary = format!("descent thm613: {}", r.verdict);
                    Outcome::report(if r.verdict { EXIT_OK } else { EXIT_FAILED }, &r, summary, json_on)
                }
                Err(err) => descent_error(err, json_on),
            }
        }
        DescentCommand::Thm614 => match decompose_singleton_orbits(&e, model, &galois.data) {
            Ok(r @ SingletonDescent::Decomposition { .. }) => {
                Outcome::report(EXIT_OK, &r, "descent thm614: decomposition".into(), json_on)
            }
            Ok(r @ SingletonDescent::HypothesisNotMet { .. }) => Outcome::report(
                EXIT_UNDETERMINED,
                &r,
                "descent thm614: hypothesis not met".into(),
                json_on,
            ),
            Err(err) => descent_error(err, json_on),
        },
        DescentCommand::Orbits | DescentCommand::Asdecomp => unreachable!("handled above"),
    }
}

/// A class written as `a,b` (quaternion symbol), `0`, or a JSON document
/// holding either local invariants or `{"a": .., "b": ..}`.
pub fn parse_class_spec(text: &str) -> Result<BrauerClass, String> {
    let t = text.trim();
    if t == "0" {
        return Ok(BrauerClass::zero());
    }
    if t.starts_with('{') {
        if let Ok(c) = serde_json::from_str::<BrauerClass>(t) {
            return Ok(c);
        }
        return serde_json::from_str::<QuaternionSymbol>(t)
            .map(|q| q.to_brauer())
            .map_err(|e| format!("cannot parse class {t:?}: {e}"));
    }
    let (a, b) = t
        .split_once(',')
        .ok_or_else(|| format!("expected `a,b`, `0` or a JSON class, got {t:?}"))?;
    quaternion(a, b).map(|q| q.to_brauer())
}

fn quaternion(a: &str, b: &str) -> Result<QuaternionSymbol, String> {
    let a = parse_rational(a.trim()).map_err(|e| e.to_string())?;
    let b = parse_rational(b.trim()).map_err(|e| e.to_string())?;
    QuaternionSymbol::new(a, b).map_err(|e| e.to_string())
}

fn class_value(c: &BrauerClass) -> Value {
    json!({
        "class": c,
        "display": c.to_string(),
        "period": c.period(),
        "index": c.index(),
        "split": c.is_split(),
    })
}

fn run_brauer(command: &BrauerCommand, json_on: bool) -> Outcome {
    let result = match command {
        BrauerCommand::Class { a, b } => quaternion(a, b).map(|q| {
            let c = q.to_brauer();
            let mut v = class_value(&c);
            v["symbol"] = json!(q);
            (v, c)
        }),
        BrauerCommand::Index { class } => parse_class_spec(class).map(|c| (class_value(&c), c)),
        BrauerCommand::Tensor { left, right } => parse_class_spec(left).and_then(|l| {
            let r = parse_class_spec(right)?;
            let c = l.tensor(&r);
            Ok((class_value(&c), c))
        }),
    };
    match result {
        Ok((value, c)) => {
            let summary = format!("{c} (index {})", c.index());
            Outcome::report(EXIT_OK, &value, summary, json_on)
        }
        Err(message) => Outcome::invalid(message, json_on),
    }
}

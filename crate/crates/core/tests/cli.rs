mod common;

use std::path::{Path, PathBuf};
use std::process::Command;

use clap::Parser;
use fano_helix::cli::{run, Cli};
use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::Value;

fn scene(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenes").join(name)
}

fn bin(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_fano-helix"))
        .args(args)
        .output()
        .expect("binary runs");
    (out.status.code().expect("exit code"), String::from_utf8(out.stdout).unwrap())
}

fn with_scene(name: &str, args: &[&str]) -> (i32, String) {
    let path = scene(name);
    let mut all: Vec<&str> = args.to_vec();
    all.push("--scene");
    all.push(path.to_str().unwrap());
    bin(&all)
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).expect("stdout is JSON")
}

#[test]
fn check_collection_exit_codes() {
    let (code, out) = with_scene("beilinson_p3.json", &["check-collection"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["strong"]["passed"], true);
    assert_eq!(v["full"]["k0_rank"], 4);

    let (code, out) = with_scene("beilinson_p3.json", &["check-collection", "O3", "O2", "O1", "O0"]);
    assert_eq!(code, 1);
    let w = &json(&out)["semiorthogonal"]["witnesses"][0];
    assert_eq!(w["degree"], 0);
    assert!(w["dim"].as_u64().unwrap() > 0);

    let (code, out) = with_scene("beilinson_p3.json", &["check-collection", "O0", "missing"]);
    assert_eq!(code, 2);
    assert_eq!(json(&out)["path"], "arguments[1]");
}

#[test]
fn helix_commands() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("q.dot");
    let (code, out) = with_scene("p2_helix.json", &["helix", "quiver", "--dot", dot.to_str().unwrap()]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&dot).unwrap();
    assert!(text.starts_with("digraph"));
    assert_eq!(text.matches(" -> ").count(), 9);
    for v in ["v0", "v1", "v2"] {
        assert!(text.contains(&format!("{v} [label=\"{v}\"]")));
    }
    assert_eq!(json(&out)["vertices"], 3);

    let (code, out) = with_scene("quadric_helix.json", &["helix", "verify"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["type"], serde_json::json!([4, 3]));
    assert_eq!(v["geometric"]["passed"], true);

    let (code, out) = with_scene("p2_helix.json", &["helix", "tilting", "--L", "10"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["certified_beyond_max_l"], true);

    let (code, _) = with_scene("p2_helix.json", &["helix", "verify", "--window", "1"]);
    assert_eq!(code, 2);
    let (code, _) = with_scene("beilinson_p3.json", &["helix", "verify"]);
    assert_eq!(code, 2);
}

#[test]
fn descent_exit_codes() {
    let (code, out) = with_scene("quaternion_curve.json", &["descent", "thm614"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["verdict"], "decomposition");
    assert_eq!(v["summands"].as_array().unwrap().len(), 2);

    let (code, _) = with_scene("quaternion_curve.json", &["descent", "asdecomp", "--bundle", "F"]);
    assert_eq!(code, 1);
    let (code, _) = with_scene("quaternion_curve.json", &["descent", "asdecomp", "--bundle", "E"]);
    assert_eq!(code, 0);

    let (code, out) = with_scene("quadric_swap.json", &["descent", "thm614"]);
    assert_eq!(code, 3);
    assert_eq!(json(&out)["verdict"], "hypothesis_not_met");
    let (code, _) = with_scene("quadric_swap.json", &["descent", "thm612"]);
    assert_eq!(code, 0);
    let (code, out) = with_scene("quadric_swap.json", &["descent", "orbits"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["orbits"], serde_json::json!([["s1", "s2"]]));
    let (code, _) = with_scene("p2_helix.json", &["descent", "thm613"]);
    assert_eq!(code, 0);
}

#[test]
fn brauer_commands() {
    let (code, out) = bin(&["brauer", "class", "-1", "-1"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["display"], "{2: 1/2, inf: 1/2}");
    let (_, out) = bin(&["brauer", "index", "0"]);
    assert_eq!(json(&out)["index"], 1);
    let (_, out) = bin(&["brauer", "tensor", "-1,-1", "-1,-1"]);
    assert_eq!(json(&out)["split"], true);
    let (code, _) = bin(&["brauer", "class", "x", "1"]);
    assert_eq!(code, 2);
    let (code, _) = bin(&["no-such-command"]);
    assert_eq!(code, 2);
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let runs: &[(&str, &[&str])] = &[
        ("beilinson_p3.json", &["check-collection"]),
        ("quadric_helix.json", &["helix", "verify"]),
        ("quadric_helix.json", &["helix", "quiver"]),
        ("p2_helix.json", &["helix", "tilting"]),
        ("quaternion_curve.json", &["descent", "thm614"]),
        ("quadric_swap.json", &["descent", "thm613"]),
    ];
    for (name, args) in runs {
        assert_eq!(with_scene(name, args), with_scene(name, args), "{name} {args:?}");
    }
    let dots: Vec<String> = (0..2)
        .map(|k| {
            let p = dir.path().join(format!("{k}.dot"));
            with_scene("quadric_helix.json", &["helix", "quiver", "--dot", p.to_str().unwrap()]);
            std::fs::read_to_string(p).unwrap()
        })
        .collect();
    assert_eq!(dots[0], dots[1]);
}

/// In-process run on a scene given as a JSON value.
fn run_value(dir: &Path, scene: &str, args: &[&str]) -> i32 {
    let path = dir.join("scene.json");
    std::fs::write(&path, scene).unwrap();
    let mut argv = vec!["fano-helix"];
    argv.extend_from_slice(args);
    argv.push("--scene");
    argv.push(path.to_str().unwrap());
    run(&Cli::try_parse_from(argv).unwrap()).code
}

fn load(name: &str) -> Value {
    json(&std::fs::read_to_string(scene(name)).unwrap())
}

/// JSON pointers of the schema-defined objects (user-keyed maps such as
/// `bundles` or `labels` accept any key, so they are skipped).
fn schema_objects(v: &Value, at: String, out: &mut Vec<String>) {
    match v {
        Value::Object(m) => {
            let schema = m.keys().any(|k| {
                matches!(
                    k.as_str(),
                    "variety" | "factors" | "dim" | "summands" | "degree" | "thread" | "labels"
                )
            });
            if schema {
                out.push(at.clone());
            }
            for (k, c) in m {
                schema_objects(c, format!("{at}/{k}"), out);
            }
        }
        Value::Array(a) => {
            for (k, c) in a.iter().enumerate() {
                schema_objects(c, format!("{at}/{k}"), out);
            }
        }
        _ => {}
    }
}

fn insert_unknown_key(v: &mut Value, rng: &mut impl Rng) {
    let mut targets = Vec::new();
    schema_objects(v, String::new(), &mut targets);
    let target = targets.choose(rng).unwrap().clone();
    v.pointer_mut(&target)
        .and_then(Value::as_object_mut)
        .unwrap()
        .insert("unexpected_field".into(), Value::Bool(true));
}

#[test]
fn mutated_scenes_land_in_their_failure_class() {
    let mut rng = common::rng(40);
    let dir = tempfile::tempdir().unwrap();
    let passing: &[(&str, &[&str])] = &[
        ("beilinson_p3.json", &["check-collection"]),
        ("quadric_helix.json", &["check-collection"]),
        ("quadric_helix.json", &["helix", "verify"]),
        ("p2_helix.json", &["helix", "tilting"]),
        ("quaternion_curve.json", &["descent", "thm614"]),
        ("quadric_swap.json", &["descent", "thm612"]),
    ];
    for (name, args) in passing {
        let base = load(name);
        assert_eq!(run_value(dir.path(), &base.to_string(), args), 0, "{name} passes");
    }
    for round in 0..60 {
        let (name, args) = passing[round % passing.len()];
        let base = load(name);

        // parse and validation failures: 2
        let text = base.to_string();
        let cut = rng.gen_range(1..text.len());
        assert_eq!(run_value(dir.path(), &text[..cut], args), 2, "truncated {name}");
        let mut v = base.clone();
        insert_unknown_key(&mut v, &mut rng);
        assert_eq!(run_value(dir.path(), &v.to_string(), args), 2, "unknown key in {name}");
        let mut v = base.clone();
        v["variety"]["factors"][0]["dim"] = Value::from(0);
        assert_eq!(run_value(dir.path(), &v.to_string(), args), 2, "zero dimension in {name}");
    }

    // failed checks: 1
    for _ in 0..20 {
        let mut v = load("beilinson_p3.json");
        let mut order: Vec<Value> = v["collection"].as_array().unwrap().clone();
        while order == v["collection"].as_array().unwrap().clone() {
            order.shuffle(&mut rng);
        }
        v["collection"] = Value::Array(order);
        assert_eq!(run_value(dir.path(), &v.to_string(), &["check-collection"]), 1);
        let mut v = load("beilinson_p3.json");
        let k = rng.gen_range(0..4);
        v["collection"].as_array_mut().unwrap().remove(k);
        assert_eq!(run_value(dir.path(), &v.to_string(), &["check-collection"]), 1);
    }

    // hypothesis not met and undetermined multiplicity: 3
    let mut v = load("quadric_swap.json");
    assert_eq!(run_value(dir.path(), &v.to_string(), &["descent", "thm614"]), 3);
    v["galois"]["multiplicities"] = serde_json::json!({});
    assert_eq!(run_value(dir.path(), &v.to_string(), &["descent", "thm612"]), 3);
    let mut v = load("quaternion_curve.json");
    v["galois"]["labels"]["o1"] = serde_json::json!({"degree": [1]});
    v["galois"]["bundle"] = serde_json::json!({"summands": [{"degree": [1], "mult": 2}]});
    assert_eq!(run_value(dir.path(), &v.to_string(), &["descent", "thm614"]), 3);
    v["galois"]["multiplicities"] = serde_json::json!({"orbit_of_o1": 2});
    assert_eq!(run_value(dir.path(), &v.to_string(), &["descent", "thm614"]), 2, "inconsistent d");
    v["galois"]["hints"] = serde_json::json!({"orbit_of_o1": {"a": "-1", "b": "-1"}});
    assert_eq!(run_value(dir.path(), &v.to_string(), &["descent", "thm614"]), 0);
}

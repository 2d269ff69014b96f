use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn clcgan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_clcgan")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn schema(name: &str) -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(format!("{name}.schema.json"));
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn assert_valid(name: &str, v: &Value) {
    let schema = schema(name);
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{name}: {errors:?}\n{v:#}");
}

/// Runs a command expected to succeed and checks its report against `schema_name`.
fn report(schema_name: &str, args: &[&str]) -> Value {
    let out = clcgan(args);
    assert_eq!(code(&out), 0, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).expect("stdout is JSON");
    assert_valid(schema_name, &v);
    v
}

fn write_config(dir: &TempDir, v: &Value) -> String {
    let path = dir.path().join("config.json");
    fs::write(&path, v.to_string()).unwrap();
    path.display().to_string()
}

fn dir_arg(dir: &TempDir, sub: &str) -> String {
    dir.path().join(sub).display().to_string()
}

#[test]
fn help_for_every_subcommand() {
    assert_eq!(code(&clcgan(&["--help"])), 0);
    for sub in ["poles", "linearize", "simulate", "train", "sweep"] {
        let out = clcgan(&[sub, "--help"]);
        assert_eq!(code(&out), 0, "{sub}");
        assert!(String::from_utf8_lossy(&out.stdout).contains("Usage"), "{sub}");
    }
}

#[test]
fn poles_wgan_is_marginal() {
    let v = report("poles", &["poles", "--objective", "wgan"]);
    assert_eq!(v["class"], "Oscillatory");
    assert_eq!(v["theorem1_threshold"], 0.0);
    assert_eq!(v["controlled_den"], json!([1.0, 0.0, 1.0]));
    let poles = v["poles"].as_array().unwrap();
    assert_eq!(poles.len(), 2);
    for p in poles {
        assert!(p["re"].as_f64().unwrap().abs() < 1e-12);
        assert!((p["im"].as_f64().unwrap().abs() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn poles_under_control_are_stable() {
    let v = report("poles", &["poles", "--objective", "wgan", "--lambda", "1"]);
    assert_eq!(v["class"], "AsymptoticallyStable");
    assert_eq!(v["routh_hurwitz_stable"], true);
    assert!(v["max_real_part"].as_f64().unwrap() < 0.0);

    let v = report("poles", &["poles", "--objective", "lsgan"]);
    assert_eq!(v["class"], "AsymptoticallyStable");
    assert_eq!(v["theorem1_threshold"], 4.0);

    let v = report("poles", &["poles", "--objective", "sgan", "--lambda", "2", "--realization", "output-damping"]);
    assert_eq!(v["realization"], "output-damping");
    assert_eq!(v["class"], "AsymptoticallyStable");
}

#[test]
fn linearize_lsgan_matrix() {
    let v = report("linearize", &["linearize", "--objective", "lsgan", "--lambda", "0.5"]);
    assert_eq!(v["matrix"], json!([[-4.0, -1.0], [1.0, 0.0]]));
    assert_eq!(v["controlled_matrix"], json!([[-4.5, -1.0], [1.0, 0.0]]));
    assert_eq!(v["input_gain"], 1.0);
    assert_eq!(v["jacobian"]["regularizer"], json!([[0.5, 0.0], [0.0, 0.0]]));
}

#[test]
fn simulate_classes_and_csv() {
    let tmp = TempDir::new().unwrap();
    let out = dir_arg(&tmp, "osc");
    let v = report("simulate", &["simulate", "--objective", "wgan", "--t-end", "50", "--out", &out]);
    assert_eq!(v["terminal_class"], "oscillatory");
    assert_eq!(v["dynamics"], "continuous");
    let csv = fs::read_to_string(tmp.path().join("osc/trajectory.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,phi,theta"));
    assert_eq!(lines.next(), Some("0.000000000000e+00,0.000000000000e+00,0.000000000000e+00"));
    assert_eq!(csv.lines().count(), 1 + v["rows"].as_u64().unwrap() as usize);

    let out = dir_arg(&tmp, "conv");
    let v = report("simulate", &["simulate", "--objective", "wgan", "--lambda", "1", "--out", &out]);
    assert_eq!(v["terminal_class"], "converged");

    let out = dir_arg(&tmp, "mom");
    let v = report("simulate", &["simulate", "--momentum-tau", "1", "--t-end", "50", "--out", &out]);
    assert_eq!(v["dynamics"], "momentum");
    assert_eq!(v["terminal_class"], "diverged");
    let csv = fs::read_to_string(tmp.path().join("mom/trajectory.csv")).unwrap();
    assert!(csv.starts_with("t,phi,theta,m\n"));

    let out = dir_arg(&tmp, "gd");
    let v = report(
        "simulate",
        &["simulate", "--scheme", "discrete-simultaneous", "--lr", "0.05", "--steps", "200", "--out", &out],
    );
    assert_eq!(v["dynamics"], "discrete");
    assert_eq!(v["rows"], 201);
}

#[test]
fn simulate_negative_initial_state_flag() {
    let tmp = TempDir::new().unwrap();
    let out = dir_arg(&tmp, "neg");
    let v = report("simulate", &["simulate", "--phi0", "-0.5", "--theta0", "2", "--t-end", "1", "--out", &out]);
    assert_eq!(v["terminated_early"], false);
    let csv = fs::read_to_string(tmp.path().join("neg/trajectory.csv")).unwrap();
    assert_eq!(csv.lines().nth(1), Some("0.000000000000e+00,-5.000000000000e-01,2.000000000000e+00"));
}

#[test]
fn momentum_needs_uncontrolled_wgan() {
    let tmp = TempDir::new().unwrap();
    let out = dir_arg(&tmp, "m");
    let o = clcgan(&["simulate", "--momentum-tau", "1", "--lambda", "1", "--out", &out]);
    assert_eq!(code(&o), 2);
}

#[test]
fn simulate_reruns_are_byte_identical() {
    let tmp = TempDir::new().unwrap();
    let runs: Vec<Vec<u8>> = ["a", "b"]
        .iter()
        .map(|d| {
            let out = dir_arg(&tmp, d);
            report("simulate", &["simulate", "--objective", "sgan", "--lambda", "0.3", "--t-end", "20", "--out", &out]);
            fs::read(tmp.path().join(d).join("trajectory.csv")).unwrap()
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn sweep_over_lambda() {
    let tmp = TempDir::new().unwrap();
    let out = dir_arg(&tmp, "s");
    let v = report("sweep", &["sweep", "--objectives", "wgan", "--lambdas", "5,0,0.5,1,2", "--out", &out]);
    assert_eq!(v["rows"], 5);
    assert_eq!(v["failed"], 0);
    let csv = fs::read_to_string(tmp.path().join("s/sweep.csv")).unwrap();
    let rows: Vec<Vec<&str>> = csv.lines().skip(1).map(|l| l.split(',').collect()).collect();
    let lambdas: Vec<&str> = rows.iter().map(|r| r[1]).collect();
    assert_eq!(lambdas, ["0", "0.5", "1", "2", "5"]);
    assert_eq!(rows[0][4], "oscillatory");
    for r in &rows[1..] {
        assert_eq!(r[4], "converged", "{r:?}");
        assert_eq!(r[4], r[5], "empirical vs pole class {r:?}");
    }
}

#[test]
fn sweep_all_objectives_from_config() {
    let tmp = TempDir::new().unwrap();
    let cfg = json!({
        "sweep": {
            "objectives": ["hinge", "lsgan", "nsgan", "sgan", "wgan"],
            "lambdas": [1.0],
            "realizations": ["input-feedback", "output-damping"]
        },
        "sim": { "t_end": 60.0, "dt": 0.01 },
        "out": dir_arg(&tmp, "s")
    });
    let path = write_config(&tmp, &cfg);
    let v = report("sweep", &["sweep", "--config", &path]);
    assert_eq!(v["rows"], 10);
    let csv = fs::read_to_string(tmp.path().join("s/sweep.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 9);
        assert_eq!(cols[5], "converged", "{line}");
    }
}

#[test]
fn empty_sweep_grid_is_a_usage_error() {
    let tmp = TempDir::new().unwrap();
    let path = write_config(&tmp, &json!({ "sweep": { "objectives": ["wgan"], "lambdas": [] } }));
    let o = clcgan(&["sweep", "--config", &path, "--out", &dir_arg(&tmp, "s")]);
    assert_eq!(code(&o), 2);
    assert!(!tmp.path().join("s/sweep.csv").exists());
    assert_eq!(code(&clcgan(&["sweep", "--out", &dir_arg(&tmp, "t")])), 2);
}

#[test]
fn bad_flags_exit_two() {
    assert_eq!(code(&clcgan(&["poles", "--objective", "vanilla"])), 2);
    assert_eq!(code(&clcgan(&["poles", "--lambda", "-1"])), 2);
    assert_eq!(code(&clcgan(&["poles", "--no-such-flag"])), 2);
    assert_eq!(code(&clcgan(&["simulate", "--method", "heun"])), 2);
    assert_eq!(code(&clcgan(&["frobnicate"])), 2);
    assert_eq!(code(&clcgan(&["poles", "--config", "/nonexistent/clcgan.json"])), 2);
}

#[test]
fn config_is_schema_checked() {
    let tmp = TempDir::new().unwrap();
    for bad in [
        json!({ "objective": "sgan", "bogus": 1 }),
        json!({ "sim": { "dt": 0.01, "stepsize": 2 } }),
        json!({ "train": { "optimizer": { "kind": "adam" } } }),
        json!({ "train": { "data": { "kind": "ring8", "radius": 1.0, "sigma": 0.05, "extra": true } } }),
        json!({ "lambda": "big" }),
    ] {
        let path = write_config(&tmp, &bad);
        let o = clcgan(&["poles", "--config", &path]);
        assert_eq!(code(&o), 2, "{bad}");
    }
    let path = write_config(&tmp, &json!({ "objective": "nsgan", "lambda": 0.25, "c": 2.0 }));
    let v = report("poles", &["poles", "--config", &path]);
    assert_eq!(v["objective"], "nsgan");
    assert_eq!(v["c"], 2.0);
    // Flags win over the file.
    let v = report("poles", &["poles", "--config", &path, "--lambda", "3"]);
    assert_eq!(v["lambda"], 3.0);
}

fn tiny_train(dir: &TempDir, extra: Value) -> String {
    let mut train = json!({
        "batch": 16,
        "buffer_mult": 4,
        "iters": 30,
        "g_hidden": [16],
        "d_hidden": [16],
        "record_every": 10,
        "eval_samples": 1000,
        "dump_samples": 50
    });
    train.as_object_mut().unwrap().extend(extra.as_object().unwrap().clone());
    write_config(dir, &json!({ "train": train }))
}

#[test]
fn train_writes_artifacts_and_is_reproducible() {
    let tmp = TempDir::new().unwrap();
    let path = tiny_train(&tmp, json!({}));
    let mut metrics = Vec::new();
    for d in ["a", "b"] {
        let out = dir_arg(&tmp, d);
        let v = report("train", &["train", "--config", &path, "--out", &out, "--seed", "7"]);
        assert_eq!(v["status"], "completed");
        assert_eq!(v["seed"], 7);
        let base = tmp.path().join(d);
        for f in ["config.json", "generator.json", "generator.bin", "discriminator.json", "discriminator.bin"] {
            assert!(base.join(f).exists(), "{f}");
        }
        let samples = fs::read_to_string(base.join("samples_30.csv")).unwrap();
        assert!(samples.starts_with("x,y\n"));
        assert_eq!(samples.lines().count(), 51);
        metrics.push(fs::read(base.join("metrics.csv")).unwrap());
    }
    assert_eq!(metrics[0], metrics[1]);
    let text = String::from_utf8(metrics[0].clone()).unwrap();
    let iters: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(iters, ["10", "20", "30"]);

    // The resolved config written next to the outputs replays the run.
    let written: Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("a/config.json")).unwrap()).unwrap();
    let replay = write_config(&tmp, &json!({ "train": written }));
    let out = dir_arg(&tmp, "c");
    report("train", &["train", "--config", &replay, "--out", &out]);
    assert_eq!(fs::read(tmp.path().join("c/metrics.csv")).unwrap(), metrics[0]);
}

#[test]
fn train_blow_up_exits_four_with_partial_outputs() {
    let tmp = TempDir::new().unwrap();
    let path =
        tiny_train(&tmp, json!({ "objective": "lsgan", "optimizer": { "kind": "sgd" }, "lr": 1e6, "iters": 50 }));
    let out = dir_arg(&tmp, "nan");
    let o = clcgan(&["train", "--config", &path, "--out", &out]);
    assert_eq!(code(&o), 4, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_valid("train", &v);
    assert_eq!(v["status"], "non-finite");
    assert!(v["iter"].as_u64().unwrap() >= 1);
    assert!(tmp.path().join("nan/metrics.csv").exists());
}

#[test]
fn train_rejects_invalid_settings() {
    let tmp = TempDir::new().unwrap();
    let path = tiny_train(&tmp, json!({ "eval_samples": 10 }));
    assert_eq!(code(&clcgan(&["train", "--config", &path, "--out", &dir_arg(&tmp, "x")])), 2);
    assert_eq!(code(&clcgan(&["train", "--lambda", "-0.5", "--out", &dir_arg(&tmp, "y")])), 2);
}

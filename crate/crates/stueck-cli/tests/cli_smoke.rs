//! End-to-end exercises of the `stueck` binary: exit codes, output schemas,
//! determinism, and the documented verdict flips.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stueck"))
}

/// Fresh per-test output directory under the system temp dir.
fn outdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("stueck-smoke-{name}"));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).expect("create test output dir");
    dir
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("run.toml");
    std::fs::write(&path, body).expect("write config");
    path
}

fn stdout_json(output: &Output) -> serde_json::Value {
    assert!(
        output.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    serde_json::from_slice(&output.stdout).expect("stdout is a JSON document")
}

const SMALL_FIELD_CONFIG: &str = r#"
[grid]
axes = [{ lo = -16.0, hi = 16.0, n = 64 }]

[evolution]
ds = 1e-3
n_steps = 200
snapshot_stride = 50

[trajectories]
n_traj = 100
"#;

#[test]
fn unknown_config_keys_exit_2_and_name_the_key() {
    let dir = outdir("unknown-key");
    let cfg = write_config(&dir, "[grid]\nmistyped_knob = 3\n");
    let out = bin()
        .args(["masses", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("mistyped_knob"),
        "stderr must name the unknown key: {stderr}"
    );
}

#[test]
fn infeasible_observables_exit_3() {
    let dir = outdir("infeasible");
    for cmd in ["table1", "masses"] {
        let out = bin()
            .args([cmd, "--dm21", "0"])
            .arg("--out")
            .arg(&dir)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(3), "{cmd} --dm21 0");
    }
}

#[test]
fn pipeline_rejects_a_degenerate_scale_with_exit_2() {
    let dir = outdir("lss-zero");
    let out = bin()
        .args(["pipeline", "--lss", "0"])
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn pipeline_verdicts_split_by_default_and_flip_at_150() {
    let dir = outdir("pipeline");
    let doc = stdout_json(&bin().arg("pipeline").arg("--out").arg(&dir).output().unwrap());
    let runs = doc["runs"].as_array().unwrap();
    assert_eq!(runs[0]["model"], "standard");
    assert_eq!(runs[0]["verdict"], "inconsistent");
    assert_eq!(runs[1]["model"], "prqm");
    assert_eq!(runs[1]["verdict"], "consistent");
    for run in runs {
        assert!(run["mass_eV"].as_f64().unwrap() > 0.0);
        assert!(run["diameter_Mpc"].as_f64().unwrap() > 0.0);
        assert!(run["ratio"].as_f64().unwrap() > 0.0);
    }

    let doc = stdout_json(
        &bin()
            .args(["pipeline", "--lss", "150"])
            .arg("--out")
            .arg(&dir)
            .output()
            .unwrap(),
    );
    let runs = doc["runs"].as_array().unwrap();
    assert_eq!(runs[0]["verdict"], "consistent", "standard at 150 Mpc");
    assert_eq!(runs[1]["verdict"], "inconsistent", "prqm at 150 Mpc");
}

#[test]
fn reruns_are_byte_identical() {
    let dir = outdir("rerun");
    let cfg = write_config(&dir, SMALL_FIELD_CONFIG);
    let mut sides = Vec::new();
    for side in ["a", "b"] {
        let sub = dir.join(side);
        std::fs::create_dir_all(&sub).unwrap();
        let out = bin()
            .args(["trajectories", "--seed", "9", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&sub)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let out = bin()
            .arg("oscillate")
            .arg("--out")
            .arg(&sub)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        sides.push(sub);
    }
    for name in [
        "trajectories.csv",
        "diagnostics.csv",
        "equivariance.json",
        "oscillation.csv",
    ] {
        let a = std::fs::read(sides[0].join(name)).unwrap();
        let b = std::fs::read(sides[1].join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical reruns");
    }
}

#[test]
fn evolve_writes_index_snapshots_and_diagnostics() {
    let dir = outdir("evolve");
    let cfg = write_config(&dir, SMALL_FIELD_CONFIG);
    let doc = stdout_json(
        &bin()
            .args(["evolve", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&dir)
            .output()
            .unwrap(),
    );
    assert!(doc["norm_drift"].as_f64().unwrap() < 1e-10);
    assert_eq!(doc["snapshots"].as_u64(), Some(5));

    let index: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("index.json")).unwrap()).unwrap();
    assert_eq!(index["schema_version"].as_u64(), Some(1));
    let entries = index["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 5);
    for entry in entries {
        for key in ["s", "norm", "expectation_K", "filename"] {
            assert!(!entry[key].is_null(), "index entry missing {key}");
        }
        let file = dir.join(entry["filename"].as_str().unwrap());
        let body = std::fs::read_to_string(&file).unwrap();
        let mut lines = body.lines();
        assert_eq!(lines.next(), Some("# schema_version=1"));
        assert_eq!(lines.next(), Some("q_0,re,im"));
        // 64 nodes follow.
        assert_eq!(lines.count(), 64);
        // Kinetic expectation of the spreading packet stays positive.
        assert!(entry["expectation_K"].as_f64().unwrap() > 0.0);
    }

    let diag = std::fs::read_to_string(dir.join("diagnostics.csv")).unwrap();
    let mut lines = diag.lines();
    assert_eq!(lines.next(), Some("# schema_version=1"));
    assert_eq!(
        lines.next(),
        Some("s,L2_continuity,L2_HJ,chetaev_action,max_abs_lambda,ks")
    );
    // Interior snapshots only, and no ensemble means no KS statistic.
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3);
    for row in rows {
        assert!(row.ends_with("NaN"), "evolve rows carry ks = NaN: {row}");
    }
}

#[test]
fn plane_wave_has_flat_stability_functional() {
    let dir = outdir("plane-wave");
    let cfg = write_config(
        &dir,
        r#"
[grid]
axes = [{ lo = 0.0, hi = 8.0, n = 64 }]

[evolution]
ds = 1e-3
n_steps = 100
snapshot_stride = 25
initial = "plane-wave"
mode = [2]
"#,
    );
    let out = bin()
        .args(["evolve", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let diag = std::fs::read_to_string(dir.join("diagnostics.csv")).unwrap();
    for row in diag.lines().skip(2) {
        let fields: Vec<&str> = row.split(',').collect();
        let lambda: f64 = fields[4].parse().unwrap();
        assert!(
            lambda.abs() < 1e-9,
            "plane wave must have zero phase curvature, got {lambda}"
        );
        let action: f64 = fields[3].parse().unwrap();
        assert!(action.abs() < 1e-12, "uniform amplitude has no action, got {action}");
    }
}

#[test]
fn oscillation_sweep_stays_in_the_unit_interval() {
    let dir = outdir("oscillate");
    let out = bin().arg("oscillate").arg("--out").arg(&dir).output().unwrap();
    assert!(out.status.success());
    let body = std::fs::read_to_string(dir.join("oscillation.csv")).unwrap();
    let mut lines = body.lines();
    assert_eq!(lines.next(), Some("# schema_version=1"));
    assert_eq!(lines.next(), Some("x,survival_standard,survival_prqm"));
    let mut n = 0;
    for row in lines {
        let fields: Vec<f64> = row.split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(fields.len(), 3);
        for p in &fields[1..] {
            assert!((0.0..=1.0).contains(p), "survival {p} out of range");
        }
        n += 1;
    }
    assert_eq!(n, 200);
}

#[test]
fn oscillation_json_format_is_selectable() {
    let dir = outdir("oscillate-json");
    let doc = stdout_json(
        &bin()
            .args(["oscillate", "--format", "json"])
            .arg("--out")
            .arg(&dir)
            .output()
            .unwrap(),
    );
    assert!(doc["file"].as_str().unwrap().ends_with("oscillation.json"));
    let body: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("oscillation.json")).unwrap())
            .unwrap();
    assert_eq!(body["schema_version"].as_u64(), Some(1));
    assert_eq!(body["rows"].as_array().unwrap().len(), 200);
}

#[test]
fn masses_model_flag_doubles_the_splittings() {
    let dir = outdir("masses-model");
    let std_doc = stdout_json(&bin().arg("masses").arg("--out").arg(&dir).output().unwrap());
    let prqm_doc = stdout_json(
        &bin()
            .args(["masses", "--model", "prqm"])
            .arg("--out")
            .arg(&dir)
            .output()
            .unwrap(),
    );
    for i in 0..3 {
        let a = std_doc["masses_abs"][i].as_f64().unwrap();
        let b = prqm_doc["masses_abs"][i].as_f64().unwrap();
        assert!(
            (b / a - std::f64::consts::SQRT_2).abs() < 1e-9,
            "doubled splittings must scale masses by sqrt(2): {a} -> {b}"
        );
    }
    for key in ["params", "masses_signed", "masses_abs", "sum", "bound_pass", "roundtrip_residuals"] {
        assert!(!std_doc[key].is_null(), "masses output missing {key}");
    }
}

#[test]
fn thread_cap_is_validated_and_applied() {
    let dir = outdir("threads");
    let out = bin()
        .arg("masses")
        .arg("--out")
        .arg(&dir)
        .env("STUECK_THREADS", "abc")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("STUECK_THREADS"),
        "error must name the variable"
    );

    let out = bin()
        .arg("masses")
        .arg("--out")
        .arg(&dir)
        .env("STUECK_THREADS", "1")
        .output()
        .unwrap();
    assert!(out.status.success());
}

#[test]
fn stride_must_divide_the_step_count() {
    let dir = outdir("stride");
    let cfg = write_config(
        &dir,
        "[evolution]\nds = 1e-3\nn_steps = 100\nsnapshot_stride = 33\n",
    );
    let out = bin()
        .args(["evolve", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

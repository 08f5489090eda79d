use std::fs;
use std::process::{Command, Output};

fn decaylab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_decaylab"))
        .args(args)
        .env_remove("DECAYLAB_OUTPUT_ROOT")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn check_condition_stefan() {
    let o = decaylab(&["check-condition", "--preset", "stefan", "--mean", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("F = [0, 1]"), "{s}");
    assert!(s.contains("nd-condition: false"));
    assert!(s.contains("gn-condition: true"));
}

#[test]
fn check_condition_burgers_negative_mean() {
    let o = decaylab(&["check-condition", "--preset", "burgers", "--mean", "-0.5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("classification: decay guaranteed"));
}

#[test]
fn unknown_preset_exits_2() {
    let o = decaylab(&["check-condition", "--preset", "kdv"]);
    assert_eq!(o.status.code(), Some(2));
    let o = decaylab(&["simulate", "--preset", "kdv", "--n", "50", "--t-end", "0.1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn simulate_emits_csv() {
    let o = decaylab(&[
        "simulate",
        "--preset",
        "burgers",
        "--n",
        "100",
        "--t-end",
        "2",
        "--samples",
        "4",
        "--entropy",
    ]);
    let s = stdout(&o);
    let mut lines = s.lines();
    assert_eq!(
        lines.next(),
        Some("time,l1_cell,stepanov_x,mean,min,max,entropy_margin")
    );
    assert_eq!(lines.count(), 5);
    // two time units are far from the 5% decay horizon, but periodic burgers
    // only fails if a hard invariant breaks
    assert!(matches!(o.status.code(), Some(0) | Some(1)));
}

#[test]
fn bad_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(&path, "scenario = \"decay\"\nbogus = 3\n").unwrap();
    let o = decaylab(&["decay-report", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = decaylab(&["decay-report", "--config", "/nonexistent/x.toml"]);
    assert_eq!(o.status.code(), Some(2));
}

const AFFINE: &str = r#"
scenario = "decay"
expect = "decay"
model = { preset = "affine" }
domain = { x_lo = -1.0, length = 2.0 }
initial = { kind = "periodic", amplitude = 0.5 }
solver = { n = 100, t_end = 2.0 }
output_dir = "affine"
"#;

#[test]
fn failed_rule_exits_1_and_writes_dir() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("affine.toml");
    fs::write(&path, AFFINE).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_decaylab"))
        .args(["decay-report", "--config", path.to_str().unwrap()])
        .env("DECAYLAB_OUTPUT_ROOT", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["verdict"], "non-decay");
    assert_eq!(report["passed"], false);
    let out = dir.path().join("affine");
    for f in ["manifest.json", "report.json", "norms.csv", "config.toml"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config_hash"], report["config_hash"]);
}

#[test]
fn reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("affine.toml");
    fs::write(&path, AFFINE.replace("output_dir = \"affine\"\n", "")).unwrap();
    let a = decaylab(&["decay-report", "--config", path.to_str().unwrap()]);
    let b = decaylab(&["decay-report", "--config", path.to_str().unwrap()]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn norms_of_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.csv");
    let mut text = String::from("x,value\n");
    for i in 0..40 {
        let x = -1.0 + (i as f64 + 0.5) * 0.05;
        text.push_str(&format!("{x},1\n"));
    }
    fs::write(&path, text).unwrap();
    let o = decaylab(&["norms", "--input", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let x: f64 = s
        .lines()
        .find_map(|l| l.strip_prefix("stepanov_x: "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((x - 2.0).abs() < 1e-12, "{s}");
}

#[test]
fn stefan_subcommand_small() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("st");
    let o = decaylab(&[
        "stefan",
        "--alpha",
        "0.2",
        "--n-y",
        "120",
        "--t-end",
        "60",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("mass_balance"));
    assert!(out.join("psi.csv").exists());
}

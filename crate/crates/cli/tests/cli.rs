use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_nisqlab"));
    c.env_remove("NISQLAB_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Parses CSV text into a header and rows, checking the metadata trailer.
fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let lines: Vec<&str> = text.lines().collect();
    let last = lines.last().expect("non-empty CSV");
    assert!(last.starts_with("# nisqlab version="), "metadata trailer missing: {last}");
    assert!(last.contains(" git=") && last.contains(" seed="), "{last}");
    let header = lines[0].split(',').map(String::from).collect();
    let rows = lines[1..lines.len() - 1]
        .iter()
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (header, rows)
}

fn column(text: &str, name: &str) -> Vec<String> {
    let (header, rows) = parse_csv(text);
    let j = header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    rows.into_iter().map(|r| r[j].clone()).collect()
}

fn floats(text: &str, name: &str) -> Vec<f64> {
    column(text, name).iter().map(|v| v.parse().unwrap()).collect()
}

fn distribution(text: &str) -> BTreeMap<String, f64> {
    column(text, "outcome").into_iter().zip(floats(text, "probability")).collect()
}

#[test]
fn bell_circuit_without_noise() {
    let bell = fixture("bell.json");
    let o = run(&["simulate", "--circuit", bell.to_str().unwrap(), "--lambda", "0"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let d = distribution(&stdout(&o));
    assert_eq!(d.len(), 2);
    assert!((d["00"] - 0.5).abs() < 1e-12 && (d["11"] - 0.5).abs() < 1e-12, "{d:?}");
}

#[test]
fn full_noise_gives_uniform_output() {
    let bell = fixture("bell.json");
    let o = run(&["simulate", "--circuit", bell.to_str().unwrap(), "--lambda", "1"]);
    assert!(o.status.success());
    let d = distribution(&stdout(&o));
    assert_eq!(d.len(), 4);
    assert!(d.values().all(|p| (p - 0.25).abs() < 1e-12), "{d:?}");
}

#[test]
fn trajectory_backend_matches_exact() {
    let bell = fixture("bell.json");
    let path = bell.to_str().unwrap();
    let exact = distribution(&stdout(&run(&["simulate", "--circuit", path, "--lambda", "0.2"])));
    let o = run(&[
        "simulate", "--circuit", path, "--lambda", "0.2", "--backend", "trajectory", "--shots", "100000", "--seed", "5",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let sampled = distribution(&stdout(&o));
    let keys: std::collections::BTreeSet<_> = exact.keys().chain(sampled.keys()).collect();
    let tv: f64 = keys
        .into_iter()
        .map(|k| (exact.get(k).unwrap_or(&0.0) - sampled.get(k).unwrap_or(&0.0)).abs())
        .sum::<f64>()
        / 2.0;
    assert!(tv < 0.02, "tv {tv}");
}

#[test]
fn shadow_decay_column_is_a_power_of_one_minus_lambda() {
    let o = run(&["experiment", "shadow-decay", "--n", "1..6", "--lambda", "0.1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let values = floats(&text, "trace_distance");
    assert_eq!(values.len(), 6);
    for (n, v) in (1..=6).zip(values) {
        assert!((v - 0.9f64.powi(n)).abs() <= 1e-10, "n={n}: {v}");
    }
}

#[test]
fn bv_repetitions_grow_logarithmically() {
    let o = run(&[
        "experiment", "bv-scaling", "--n", "8,16,32,64", "--lambda", "0.05", "--delta", "0.01", "--trials", "10", "--seed", "1",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let m = floats(&text, "M");
    // Doubling n adds ln 2 / (2 g^2) with g = 0.95^6 - 1/2; ceilings move each step by at most 1.
    let g = 0.95f64.powi(6) - 0.5;
    let step = 2f64.ln() / (2.0 * g * g);
    for w in m.windows(2) {
        assert!((w[1] - w[0] - step).abs() <= 1.0, "{m:?}");
    }
    // n = 64 does not fit the simulator's outcome word and is reported without trials.
    assert_eq!(column(&text, "trials"), vec!["10", "10", "10", "0"]);
}

#[test]
fn codes_verify_passes_every_check() {
    let o = run(&["experiment", "codes-verify", "--seed", "3", "--trials", "2000"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let holds = column(&stdout(&o), "holds");
    assert_eq!(holds.len(), 6);
    assert!(holds.iter().all(|h| h == "true"));
}

#[test]
fn identical_inputs_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = run(&[
            "experiment", "grover-degradation", "--n", "4,8", "--t", "1,2", "--shots", "500", "--seed", "11", "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for file in ["grover-degradation.csv", "grover-degradation.svg"] {
        let (x, y) = (std::fs::read(a.join(file)).unwrap(), std::fs::read(b.join(file)).unwrap());
        assert!(!x.is_empty());
        assert_eq!(x, y, "{file} differs");
    }
    let text = std::fs::read_to_string(a.join("grover-degradation.csv")).unwrap();
    assert!(text.lines().last().unwrap().contains("seed=11"));
    let svg = std::fs::read_to_string(a.join("grover-degradation.svg")).unwrap();
    assert!(svg.contains("<polyline") && svg.contains("stroke-dasharray"));
}

#[test]
fn seed_precedence_flag_then_config_then_env() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"seed": 21, "n": [12], "trials": 50}"#).unwrap();
    let seed_of = |o: &Output| {
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        stdout(o).lines().last().unwrap().split(' ').find_map(|w| w.strip_prefix("seed=")).unwrap().to_string()
    };
    let cfg = cfg.to_str().unwrap();
    let base = ["experiment", "subset-separation", "--config", cfg];
    assert_eq!(seed_of(&run(&base)), "21");
    assert_eq!(seed_of(&run(&[&base[..], &["--seed", "4"]].concat())), "4");

    std::fs::write(dir.path().join("noseed.json"), r#"{"n": "12", "trials": 50}"#).unwrap();
    let noseed = dir.path().join("noseed.json");
    let args = ["experiment", "subset-separation", "--config", noseed.to_str().unwrap()];
    let o = bin().args(args).env("NISQLAB_SEED", "77").output().unwrap();
    assert_eq!(seed_of(&o), "77");
    let o = bin().args(["experiment", "subset-separation", "--config", cfg]).env("NISQLAB_SEED", "77").output().unwrap();
    assert_eq!(seed_of(&o), "21");
}

#[test]
fn config_file_can_name_the_experiment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"experiment": "lifted-simon-tv", "n": 2, "lambda": [0.6]}"#).unwrap();
    let o = run(&["experiment", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(column(&stdout(&o), "holds"), vec!["true"]);
}

#[test]
fn usage_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"seeds": 1}"#).unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["experiment", "no-such-thing"],
        vec!["experiment", "bv-scaling"],
        vec!["experiment", "shadow-decay", "--delta", "0.1"],
        vec!["experiment", "shadow-decay", "--lambda", "2"],
        vec!["experiment", "shadow-decay", "--n", "6..1"],
        vec!["experiment", "shadow-decay", "--config", bad.to_str().unwrap()],
        vec!["experiment", "shadow-decay", "--bogus"],
        vec!["simulate"],
        vec!["verify", "--only", "nothing"],
    ];
    for args in cases {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn capacity_errors_exit_with_3() {
    let o = run(&["experiment", "shadow-decay", "--n", "9"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn verify_runs_selected_suites() {
    let o = run(&["verify", "--only", "metrics"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["suites"], serde_json::json!(["metrics"]));
    assert_eq!(v["failed"], 0);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["suite"] == "metrics"));
}

#[test]
fn verify_passes_on_a_clean_build() {
    let o = run(&["verify", "--threads", "1"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(o.status.success(), "{v:#}");
    assert_eq!(v["suites"].as_array().unwrap().len(), 6);
    assert!(v["passed"].as_u64().unwrap() >= 20);
}

#[test]
fn verify_catches_a_flipped_noise_sign() {
    let o = run(&["verify", "--inject-fault", "lambda-sign"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["fault"], "lambda-sign");
    assert!(v["failed"].as_u64().unwrap() >= 3, "{v:#}");
}

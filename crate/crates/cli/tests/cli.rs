use std::path::Path;
use std::process::{Command, Output};

use rug::Float;
use serde_json::Value;

const BITS: u32 = 256;

fn ndim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ndim"))
        .args(args)
        .env_remove("NDIM_DIGITS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn real(v: &Value) -> Float {
    let s = v.as_str().unwrap_or_else(|| panic!("{v} is not a string"));
    Float::with_val(BITS, Float::parse(s).unwrap())
}

fn rel(a: &Float, b: &Float) -> f64 {
    let d = Float::with_val(BITS, a - b).abs();
    (d / Float::with_val(BITS, b.abs_ref())).to_f64()
}

#[test]
fn master_exponents_records() {
    let out = ndim(&["eval", "master", "--exponents", "-1,-1,-1,-1,-1", "--dim", "3.8"]);
    assert!(out.status.success());
    let r = json(&out);
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["comparisons"].as_array().unwrap().len(), 0);
    let res = &r["result"];
    assert!(
        rel(
            &real(&res["pi_exponent"]),
            &Float::with_val(BITS, Float::parse("3.8").unwrap())
        ) < 1e-45
    );
    assert!(
        rel(
            &real(&res["p2_exponent"]),
            &Float::with_val(BITS, Float::parse("-1.2").unwrap())
        ) < 1e-45
    );
    assert_eq!(res["digits"], 50);
}

#[test]
fn bubble_in_three_dimensions_is_pi_cubed() {
    let out = ndim(&["eval", "bubble", "--e", "-1", "--f", "-1", "--dim", "3", "--p2", "1"]);
    assert!(out.status.success());
    let res = &json(&out)["result"];
    let pi = std::f64::consts::PI;
    let c = real(&res["coefficient"]).to_f64();
    let p = real(&res["pi_exponent"]).to_f64();
    assert!((c * pi.powf(p) - pi.powi(3)).abs() < 1e-12 * pi.powi(3));
}

#[test]
fn p2_scales_by_its_exponent() {
    let one = json(&ndim(&["eval", "bubble", "--dim", "3.5"]));
    let two = json(&ndim(&["eval", "bubble", "--dim", "3.5", "--p2", "2"]));
    let ratio = real(&two["result"]["coefficient"]) / real(&one["result"]["coefficient"]);
    let expected = 2f64.powf(-0.25);
    assert!((ratio.to_f64() - expected).abs() < 1e-14);
}

#[test]
fn triangle_outside_region() {
    let out = ndim(&[
        "eval",
        "triangle",
        "--rep",
        "four-term",
        "--exponents",
        "-1.1,-0.9,-1.05",
        "--q2",
        "4",
        "--r2",
        "0.09",
        "--dim",
        "4.6",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    assert_eq!(r["status"], "error");
    assert_eq!(r["error"]["category"], "OutsideRegion");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(ndim(&["eval", "master", "--bogus"]).status.code(), Some(2));
}

#[test]
fn verify_identities_pass() {
    let out = ndim(&["verify", "identities"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let r = json(&out);
    let checks = r["comparisons"].as_array().unwrap();
    let names: Vec<&str> = checks.iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"pochhammer-continuation") && names.contains(&"gauss-summation"));
    assert!(checks.iter().all(|c| c["status"] == "pass"));
}

#[test]
fn verify_master_agrees_with_closed_form() {
    let out = ndim(&["verify", "master"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let r = json(&out);
    let c = r["comparisons"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "master-closed-form")
        .unwrap()
        .clone();
    assert_eq!(c["status"], "pass");
    assert!(real(&c["worst_relative_error"]) <= 1e-25);
}

#[test]
fn low_digits_flag_epsilon_limit() {
    let out = ndim(&["verify", "master", "--digits", "20"]);
    let r = json(&out);
    let eps = r["comparisons"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "epsilon-limit")
        .unwrap()
        .clone();
    assert!(eps["warnings"]
        .as_array()
        .unwrap()
        .iter()
        .any(|w| w == "reduced-precision"));
    let warned = r["warnings"]
        .as_array()
        .unwrap()
        .iter()
        .any(|w| w.as_str().unwrap().starts_with("epsilon-limit"));
    assert!(warned);
}

#[test]
fn empty_grid_after_pole_filter() {
    let out = ndim(&["sweep", "master", "--grid", "4:4:3", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        stdout.trim_end(),
        "D,coefficient,pi_exponent,p2_exponent,terms,tail_bound,flags"
    );
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    let r = json(&ndim(&["sweep", "master", "--grid", "4:4:3"]));
    assert_eq!(r["rows"].as_array().unwrap().len(), 0);
    assert!(!r["warnings"].as_array().unwrap().is_empty());
}

#[test]
fn pole_rows_removed_others_kept() {
    let r = json(&ndim(&["sweep", "master", "--grid", "3.5:4.5:3", "--digits", "30"]));
    let rows = r["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(r["status"], "ok");
}

#[test]
fn row_errors_set_exit_status() {
    let out = ndim(&["sweep", "master", "--grid", "1:3:3", "--digits", "30"]);
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    let flags: Vec<String> = r["rows"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|row| {
            row["flags"]
                .as_array()
                .unwrap()
                .iter()
                .map(|f| f.as_str().unwrap().to_string())
                .collect::<Vec<_>>()
        })
        .collect();
    assert!(flags.iter().any(|f| f.starts_with("error:")));
}

#[test]
fn csv_column_order() {
    let out = ndim(&[
        "sweep",
        "threeloop",
        "--grid",
        "3.4:3.6:3",
        "--digits",
        "30",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header,
        [
            "D",
            "coefficient",
            "pi_exponent",
            "p2_exponent",
            "terms",
            "tail_bound",
            "flags"
        ]
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3);
    let d = Float::with_val(BITS, Float::parse(&rows[1][0]).unwrap());
    assert!((d.to_f64() - 3.5).abs() < 1e-25);
}

/// `6 zeta(3)` by the alternating central-binomial series.
fn six_zeta3() -> Float {
    let mut sum = Float::with_val(BITS, 0);
    let mut binom = Float::with_val(BITS, 1);
    for n in 1u32..200 {
        binom *= 2 * (2 * n - 1);
        binom /= n;
        let term = Float::with_val(BITS, 1) / (Float::with_val(BITS, n).square() * n * &binom);
        if n % 2 == 1 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    sum * 15u32
}

#[test]
fn epsilon_sweep_approaches_six_zeta3() {
    let out = ndim(&["sweep", "master", "--epsilons", "0.01,0.001,0.0001"]);
    assert!(out.status.success());
    let r = json(&out);
    let target = six_zeta3();
    let gaps: Vec<f64> = r["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|row| rel(&real(&row["coefficient"]), &target))
        .collect();
    assert_eq!(gaps.len(), 3);
    assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{gaps:?}");
    assert!(gaps[2] < 1e-3);
}

#[test]
fn threeloop_sweep_matches_closed_form_columns() {
    let grid = ["--grid", "3.3:4.6:14", "--digits", "40"];
    let series = json(&ndim(&[&["sweep", "threeloop"][..], &grid[..]].concat()));
    let closed = json(&ndim(
        &[&["sweep", "threeloop", "--form", "closed"][..], &grid[..]].concat(),
    ));
    let a = series["rows"].as_array().unwrap();
    let b = closed["rows"].as_array().unwrap();
    assert!(a.len() >= 8, "{} admissible rows", a.len());
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(b) {
        assert_eq!(x["D"], y["D"]);
        assert_eq!(x["pi_exponent"], y["pi_exponent"]);
        assert_eq!(x["p2_exponent"], y["p2_exponent"]);
        assert!(rel(&real(&x["coefficient"]), &real(&y["coefficient"])) < 1e-20);
    }
    assert!(series["comparisons"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["status"] == "pass"));
}

fn write(dir: &Path, name: &str, bytes: &[u8]) -> String {
    let path = dir.join(name);
    std::fs::write(&path, bytes).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn json_report_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 3] = [
        &[
            "eval",
            "master",
            "--dim",
            "4.3",
            "--digits",
            "35",
            "--exponents",
            "-1,-1,-1,-1,-1.5",
        ],
        &["sweep", "threeloop", "--grid", "3.5:4.5:3", "--digits", "30"],
        &[
            "eval",
            "triangle",
            "--exponents",
            "-1.1,-0.9,-1.05",
            "--q2",
            "0.04",
            "--r2",
            "0.09",
            "--dim",
            "4.6",
            "--digits",
            "30",
        ],
    ];
    for (k, args) in cases.iter().enumerate() {
        let first = ndim(args);
        let path = write(dir.path(), &format!("r{k}.json"), &first.stdout);
        let command = args[0];
        let second = ndim(&[command, "--config", &path]);
        assert_eq!(first.stdout, second.stdout, "{args:?}");
        assert_eq!(first.status.code(), second.status.code());
    }
}

#[test]
fn precedence_flags_env_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "cfg.json",
        br#"{"digits": 40, "target": "master", "dim": "3.8"}"#,
    );
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_ndim"));
        cmd.args(["eval", "--config", &path])
            .args(extra)
            .env_remove("NDIM_DIGITS");
        if let Some(v) = env {
            cmd.env("NDIM_DIGITS", v);
        }
        json(&cmd.output().unwrap())["digits"].as_u64().unwrap()
    };
    assert_eq!(run(None, &[]), 40);
    assert_eq!(run(Some("30"), &[]), 30);
    assert_eq!(run(Some("30"), &["--digits", "25"]), 25);
}

#[test]
fn help_documents_precedence() {
    let out = ndim(&["--help"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("NDIM_DIGITS") && text.contains("precedence"));
}

use std::path::PathBuf;
use std::process::{Command, Output};

use relmetric::domains::{DomainSpec, SupremumStrategy};
use relmetric::harness::VerificationReport;
use relmetric::metrics::{self, MetricValue};
use relmetric::{ExtendedPoint, MetricId};

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relmetric")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn value_line(o: &Output) -> f64 {
    stdout(o).lines().find_map(|l| l.strip_prefix("value: ")).expect("value line").trim().parse().unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn compute_golden_values() {
    let punctured = fixture("punctured.json");
    let o = run(&["compute", "--metric", "rho", "--domain", &punctured, "--x", "1,0", "--y", "-1,0"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!((value_line(&o) - 1.762_747_174_04).abs() < 1e-11);
    assert!(stdout(&o).contains("exactness: exact"));

    let o = run(&["compute", "--metric", "delta_p", "--p", "1", "--domain", &punctured, "--x", "1,0", "--y", "-1,0"]);
    assert!((value_line(&o) - 1.609_437_912_43).abs() < 1e-11);

    let half = fixture("halfspace.json");
    let o = run(&["compute", "--metric", "j", "--domain", &half, "--x", "0,1", "--y", "0,2.718281828459045"]);
    assert!((value_line(&o) - 1.0).abs() < 1e-12);

    let o = run(&["compute", "--metric", "j_p", "--p", "inf", "--domain", &punctured, "--x", "1,0", "--y", "-1,0"]);
    assert!((value_line(&o) - 3f64.ln()).abs() < 1e-12);
}

#[test]
fn compute_json_round_trips() {
    let o = run(&[
        "compute",
        "--metric",
        "j_pointed",
        "--b",
        "inf",
        "--domain",
        &fixture("punctured.json"),
        "--x",
        "1,0",
        "--y",
        "-1,0",
        "--json",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: MetricValue = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v.metric, MetricId::JPointed);
    assert!((v.value - 3f64.ln()).abs() < 1e-15);
    assert_eq!(v.witnesses.len(), 2);
}

#[test]
fn invalid_input_exits_with_two() {
    let punctured = fixture("punctured.json");
    let o = run(&["compute", "--metric", "rho", "--domain", &punctured, "--x", "0,0", "--y", "-1,0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("x is a boundary point"), "{}", stderr(&o));

    let o = run(&["compute", "--metric", "delta_p", "--domain", &punctured, "--x", "1,0", "--y", "-1,0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--p"));

    let o = run(&["compute", "--metric", "rho", "--domain", "/nonexistent.json", "--x", "1,0", "--y", "2,0"]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["compute", "--metric", "nope", "--domain", &punctured, "--x", "1,0", "--y", "2,0"]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["verify", "--suite", "thm99"]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["verify", "--suite", "thm15", "--p", "1", "--q", "2", "--samples", "5"]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["verify", "--suite", "thm13", "--samples", "5", "--out", "/nonexistent/dir/r.json"]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["verify", "--suite", "thm13", "--samples", "5", "--dim", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_writes_reproducible_reports() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let o = run(&[
            "verify",
            "--suite",
            "thm13",
            "--samples",
            "10000",
            "--seed",
            "42",
            "--dim",
            "2",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let ra = VerificationReport::from_json(&std::fs::read_to_string(&a).unwrap()).unwrap();
    let rb = VerificationReport::from_json(&std::fs::read_to_string(&b).unwrap()).unwrap();
    assert_eq!(ra.n_violations, 0);
    assert_eq!(ra.n_cases, 10_002);
    assert_eq!(ra.canonical_json(), rb.canonical_json());
}

#[test]
fn verify_axioms_full_size() {
    let o = run(&["verify", "--suite", "axioms", "--samples", "100000", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = VerificationReport::from_json(&stdout(&o)).unwrap();
    assert!(r.checks.iter().all(|c| c.evaluations == 100_000));
}

#[test]
fn bound_probe_exits_zero_with_recorded_violations() {
    let o = run(&["verify", "--suite", "bound-probe", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = VerificationReport::from_json(&stdout(&o)).unwrap();
    let delta = r.check("delta >= exp(q(dG) q(x,y)) - 1").unwrap();
    assert!(delta.violations > 0);
    assert!(!r.probe_witnesses.is_empty());

    let o = run(&["probe", "--domain", &fixture("zero_inf.json"), "--x", "1,0", "--y", "-1,0", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["delta_bound_violated"], true);
    assert_eq!(v["rho_bound_violated"], false);
}

#[test]
fn sharpness_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.json");
    let o = run(&["sharpness", "--case", "thm15iii", "--p", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = VerificationReport::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let last = r.trace.last().unwrap();
    assert!((last.ratio - 2.0).abs() < 5e-3);

    let o = run(&["sharpness", "--case", "thm13i-upper"]);
    assert_eq!(o.status.code(), Some(0));
    let r = VerificationReport::from_json(&stdout(&o)).unwrap();
    let k = relmetric::harness::SharpConstants::compute();
    assert!((r.sharpest_ratio.unwrap() - k.c13i).abs() < 1e-12);

    assert_eq!(run(&["sharpness", "--case", "thm77"]).status.code(), Some(2));
}

#[test]
fn ball_contour_for_j_on_the_half_plane() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("j.csv");
    let o = run(&[
        "ball",
        "--metric",
        "j",
        "--domain",
        &fixture("halfspace.json"),
        "--center",
        "0,1",
        "--radius-value",
        &2f64.ln().to_string(),
        "--resolution",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("theta,x1,x2\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 4);
    let hit = rows.iter().any(|r| {
        let (a, b): (f64, f64) = (r[1].parse().unwrap(), r[2].parse().unwrap());
        a.abs() < 1e-8 && (b - 2.0).abs() < 1e-8
    });
    assert!(hit, "{text}");
}

#[test]
fn ball_contour_for_rho_on_the_punctured_plane() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rho.csv");
    let arch3 = relmetric::extended_space::arch(3.0).unwrap();
    let o = run(&[
        "ball",
        "--metric",
        "rho",
        "--domain",
        &fixture("punctured.json"),
        "--center",
        "1,0",
        "--radius-value",
        &arch3.to_string(),
        "--resolution",
        "16",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = csv_rows(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(rows.len(), 16);

    let g = DomainSpec::punctured(vec!["0,0".parse().unwrap()]).unwrap();
    let center: ExtendedPoint = "1,0".parse().unwrap();
    let ex = SupremumStrategy::exhaustive();
    for r in &rows {
        let y = ExtendedPoint::Finite(vec![r[1].parse().unwrap(), r[2].parse().unwrap()]);
        let d = metrics::rho(&g, &center, &y, &ex).unwrap().value;
        assert!((d - arch3).abs() < 1e-8, "{r:?}: {d}");
    }
    // The ray toward -e1 first meets the level at (3 - 2 sqrt 2) e1, before
    // the puncture; -e1 itself is a point of tangency with the level set.
    let back = &rows[8];
    let x1: f64 = back[1].parse().unwrap();
    assert!((x1 - (3.0 - 8f64.sqrt())).abs() < 1e-8, "{back:?}");
    let to_minus_e1 = metrics::rho(&g, &center, &"-1,0".parse().unwrap(), &ex).unwrap().value;
    assert!((to_minus_e1 - arch3).abs() < 1e-15);
}

#[test]
fn ball_rejects_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let out = out.to_str().unwrap();
    let half = fixture("halfspace.json");
    let o = run(&["ball", "--metric", "j", "--domain", &half, "--center", "0,-1", "--radius-value", "1", "--out", out]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["ball", "--metric", "j", "--domain", &half, "--center", "0,1", "--radius-value", "-1", "--out", out]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&[
        "ball",
        "--metric",
        "j",
        "--domain",
        &fixture("ball3.json"),
        "--center",
        "0,0,0",
        "--radius-value",
        "1",
        "--out",
        out,
    ]);
    assert_eq!(o.status.code(), Some(2));
}

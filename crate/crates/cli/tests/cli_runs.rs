//! End-to-end runs of the binary: exit statuses, report round-trips and
//! determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn eqsys() -> Command {
    Command::new(env!("CARGO_BIN_EXE_eqsys"))
}

fn run(args: &[&str]) -> Output {
    eqsys().args(args).output().expect("binary runs")
}

fn write_file(dir: &Path, name: &str, content: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path
}

const BUSINESS_FIXTURE: &str = "\
id,category,zip,price,rating,n_reviews,is_closed,is_groupon,last_review_date
r0,Food,z1,1,4.0,10,1,1,2011-02-01
r1,Food,z1,1,3.0,5,0,0,
r2,Food,z1,2,2.5,8,0,1,2011-03-05
r3,Bars,z2,2,4.5,20,1,0,2010-11-30
r4,Bars,z2,2,3.5,12,0,0,
r5,Spas,z2,3,4.8,7,1,1,2011-06-10
r6,Spas,z2,3,2.2,3,0,0,
r7,Food,z3,1,3.9,16,0,0,
r8,Food,z3,3,4.1,9,1,0,2011-01-15
r9,Spas,z3,1,3.3,6,0,1,2011-04-20
";

#[test]
fn features_match_hand_tally() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "biz.csv", BUSINESS_FIXTURE);
    let out = dir.path().join("features.csv");
    let result = run(&[
        "features",
        "--input",
        input.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(result.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "id,fzrisk,fprisk,gzrisk,gprisk");
    // Hand tally: zip z1 = {r0,r1,r2}, closed {r0} -> 1/3; price tier 1 =
    // {r0,r1,r7,r9}, closed {r0} -> 1/4; groupon in z1 = {r0,r2} -> 2/3;
    // groupon in tier 1 = {r0,r9} -> 1/2.
    let r0: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(r0[0], "r0");
    assert_eq!(r0[1], (1.0_f64 / 3.0).to_string());
    assert_eq!(r0[2], "0.25");
    assert_eq!(r0[3], (2.0_f64 / 3.0).to_string());
    assert_eq!(r0[4], "0.5");
    // zip z2 = {r3,r4,r5,r6}, closed {r3,r5} -> 0.5.
    let r4: Vec<&str> = lines[5].split(',').collect();
    assert_eq!(r4[0], "r4");
    assert_eq!(r4[1], "0.5");
}

#[test]
fn sample_is_deterministic_and_reloadable() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "biz.csv", BUSINESS_FIXTURE);
    let out_a = dir.path().join("a.csv");
    let out_b = dir.path().join("b.csv");
    for out in [&out_a, &out_b] {
        let result = run(&[
            "sample",
            "--input",
            input.to_str().unwrap(),
            "--sample-n",
            "3",
            "--window-start",
            "2011-01-01",
            "--seed",
            "7",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(result.status.success(), "{result:?}");
    }
    let a = std::fs::read(&out_a).unwrap();
    let b = std::fs::read(&out_b).unwrap();
    assert_eq!(a, b, "same seed must give identical bytes");
    // Sampled records exclude deal businesses.
    let text = String::from_utf8(a).unwrap();
    for line in text.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[7], "0", "sampled a groupon business: {line}");
    }
}

#[test]
fn sample_too_large_is_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "biz.csv", BUSINESS_FIXTURE);
    let out = dir.path().join("s.csv");
    let result = run(&[
        "sample",
        "--input",
        input.to_str().unwrap(),
        "--sample-n",
        "50",
        "--window-start",
        "2011-01-01",
        "--seed",
        "7",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(result.status.code(), Some(3));
}

#[test]
fn missing_second_formula_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "biz.csv", BUSINESS_FIXTURE);
    let result = run(&[
        "fit-biprobit",
        "--input",
        input.to_str().unwrap(),
        "--formula1",
        "isClosed ~ rate",
    ]);
    assert_eq!(result.status.code(), Some(2));
}

#[test]
fn bad_formula_is_config_error_and_unknown_variable_is_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "biz.csv", BUSINESS_FIXTURE);
    let bad = run(&[
        "fit-probit",
        "--input",
        input.to_str().unwrap(),
        "--formula1",
        "no tilde here",
    ]);
    assert_eq!(bad.status.code(), Some(2));
    let unknown = run(&[
        "fit-probit",
        "--input",
        input.to_str().unwrap(),
        "--formula1",
        "isClosed ~ nosuchcolumn",
    ]);
    assert_eq!(unknown.status.code(), Some(3));
}

#[test]
fn missing_input_column_is_data_error() {
    let dir = tempfile::tempdir().unwrap();
    // Generic CSV without the referenced outcome column.
    let input = write_file(dir.path(), "gen.csv", "a,b\n1.0,2.0\n0.0,1.0\n3.0,0.5\n");
    let result = run(&[
        "fit-probit",
        "--input",
        input.to_str().unwrap(),
        "--formula1",
        "y ~ a",
    ]);
    assert_eq!(result.status.code(), Some(3));
}

#[test]
fn non_convergence_exits_4_but_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    // Perfectly separable outcome drives the probit to the boundary.
    let mut csv = String::from("y,x\n");
    for i in 0..40 {
        let x = i as f64 - 19.5;
        csv.push_str(&format!("{},{}\n", u8::from(x > 0.0), x));
    }
    let input = write_file(dir.path(), "sep.csv", &csv);
    let report_path = dir.path().join("report.json");
    let result = run(&[
        "fit-probit",
        "--input",
        input.to_str().unwrap(),
        "--formula1",
        "y ~ x",
        "--format",
        "structured",
        "--out",
        report_path.to_str().unwrap(),
    ]);
    assert_eq!(result.status.code(), Some(4));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report["probit"]["converged"], serde_json::Value::Bool(false));
}

#[test]
fn structured_report_round_trips_exact_values() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("sim.csv");
    let status = eqsys()
        .args([
            "simulate",
            "--kind",
            "biprobit",
            "--n",
            "800",
            "--beta1",
            "0.6,-0.2",
            "--beta2",
            "-0.4,0.1",
            "--rho",
            "0.25",
            "--seed",
            "99",
            "--out",
            data.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());

    let report_path = dir.path().join("fit.json");
    let result = run(&[
        "fit-biprobit",
        "--input",
        data.to_str().unwrap(),
        "--formula1",
        "y1 ~ x1_1",
        "--formula2",
        "y2 ~ x2_1",
        "--format",
        "structured",
        "--out",
        report_path.to_str().unwrap(),
    ]);
    assert!(result.status.success(), "{result:?}");

    // Reparse and re-serialize: byte-identical JSON means no precision
    // was lost anywhere in the round trip.
    let text = std::fs::read_to_string(&report_path).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    let rho = value["biprobit"]["joint"]["rho"].as_f64().unwrap();
    assert!(rho.is_finite() && rho.abs() < 1.0);
    let reserialized = serde_json::to_string_pretty(&value).unwrap();
    let reparsed: serde_json::Value = serde_json::from_str(&reserialized).unwrap();
    assert_eq!(value, reparsed);
}

#[test]
fn simulate_then_fit_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut artifacts = Vec::new();
    // Identical invocations twice over, same paths, byte-compared.
    for _ in 0..2 {
        let data = dir.path().join("sim.csv");
        let report = dir.path().join("sim.json");
        assert!(eqsys()
            .args([
                "simulate",
                "--kind",
                "sure",
                "--n",
                "600",
                "--beta1",
                "1.0,0.5",
                "--beta2",
                "-0.5,1.0",
                "--rho",
                "0.5",
                "--seed",
                "4242",
                "--out",
                data.to_str().unwrap(),
            ])
            .status()
            .unwrap()
            .success());
        assert!(run(&[
            "fit-sure",
            "--input",
            data.to_str().unwrap(),
            "--formula1",
            "y1 ~ x1_1",
            "--formula2",
            "y2 ~ x2_1",
            "--format",
            "structured",
            "--out",
            report.to_str().unwrap(),
        ])
        .status
        .success());
        artifacts.push((
            std::fs::read(&data).unwrap(),
            std::fs::read(&report).unwrap(),
            std::fs::read(dir.path().join("sim.csv.truth.json")).unwrap(),
        ));
    }
    assert_eq!(artifacts[0].0, artifacts[1].0, "dataset bytes differ");
    assert_eq!(artifacts[0].1, artifacts[1].1, "report bytes differ");
    assert_eq!(artifacts[0].2, artifacts[1].2, "truth sidecar bytes differ");
}

#[test]
fn no_constant_flag_drops_intercept_rows() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("sim.csv");
    assert!(eqsys()
        .args([
            "simulate",
            "--kind",
            "biprobit",
            "--n",
            "500",
            "--beta1",
            "0.8",
            "--beta2",
            "-0.6",
            "--rho",
            "0.0",
            "--seed",
            "11",
            "--no-intercept",
            "--out",
            data.to_str().unwrap(),
        ])
        .status()
        .unwrap()
        .success());
    let report_path = dir.path().join("fit.json");
    let result = run(&[
        "fit-probit",
        "--input",
        data.to_str().unwrap(),
        "--formula1",
        "y1 ~ x1_1",
        "--no-constant",
        "--format",
        "structured",
        "--out",
        report_path.to_str().unwrap(),
    ]);
    assert!(result.status.success(), "{result:?}");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    let rows = report["probit"]["coefficients"].as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["name"], "x1_1");
}

#[test]
fn spec_test_reports_preference() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("sim.csv");
    assert!(eqsys()
        .args([
            "simulate",
            "--kind",
            "biprobit",
            "--n",
            "2000",
            "--beta1",
            "0.5,-0.4",
            "--beta2",
            "-0.5,0.3",
            "--rho",
            "0.4",
            "--seed",
            "2024",
            "--out",
            data.to_str().unwrap(),
        ])
        .status()
        .unwrap()
        .success());
    let report_path = dir.path().join("spec.json");
    let result = run(&[
        "spec-test",
        "--input",
        data.to_str().unwrap(),
        "--formula1",
        "y1 ~ x1_1",
        "--formula2",
        "y2 ~ x2_1",
        "--format",
        "structured",
        "--out",
        report_path.to_str().unwrap(),
    ]);
    assert!(result.status.success(), "{result:?}");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    // rho = 0.4 at n = 2000 is decisive.
    assert_eq!(report["spec_test"]["preferred"], "joint");
    let aic_joint = report["spec_test"]["aic_joint"].as_f64().unwrap();
    let aic_separate = report["spec_test"]["aic_separate"].as_f64().unwrap();
    assert!(aic_joint < aic_separate);
}

#[test]
fn business_mode_full_pipeline_runs() {
    // Enough synthetic businesses for a small probit on the risk rates.
    let mut csv = String::from(
        "id,category,zip,price,rating,n_reviews,is_closed,is_groupon,last_review_date\n",
    );
    let mut state = 0x9e3779b97f4a7c15u64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    for i in 0..400 {
        let zip = format!("z{}", i % 12);
        let price = 1 + (i % 4);
        let rating = (1.0 + (next() * 4.0 * 2.0).round() / 2.0).min(5.0);
        let reviews = 1 + (next() * 60.0) as u32;
        let closed = u8::from(next() < 0.25);
        let groupon = u8::from(next() < 0.3);
        csv.push_str(&format!(
            "b{i},Food,{zip},{price},{rating},{reviews},{closed},{groupon},2011-05-01\n"
        ));
    }
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "population.csv", &csv);
    let report_path = dir.path().join("probit.json");
    let result = run(&[
        "fit-probit",
        "--input",
        input.to_str().unwrap(),
        "--formula1",
        "isClosed ~ fzrisk, fprisk, rate*nreview, nreview, rate",
        "--format",
        "structured",
        "--out",
        report_path.to_str().unwrap(),
    ]);
    assert!(result.status.success(), "{result:?}");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report["data"]["mode"], "business");
    let rows = report["probit"]["coefficients"].as_array().unwrap();
    let names: Vec<&str> = rows.iter().map(|r| r["name"].as_str().unwrap()).collect();
    assert_eq!(
        names,
        vec!["fzrisk", "fprisk", "rate*nreview", "nreview", "rate", "intercept"]
    );
    let auc = report["probit"]["auc"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&auc));
}

use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sp4-jacquet"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn rejects_unsupported_modulus() {
    assert_eq!(run(&["verify", "--q", "4"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--q", "13"]).status.code(), Some(2));
    assert_eq!(run(&["orbits", "--q", "9"]).status.code(), Some(2));
}

#[test]
fn rejects_bad_gamma_and_flags() {
    assert_eq!(
        run(&["verify", "--q", "3", "--gamma", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["verify", "--q", "3", "--gamma", "3"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["verify", "--suite", "nonsense"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["verify", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(run(&[]).status.code(), Some(2));
}

#[test]
fn deep_gate_at_q11() {
    let out = run(&["verify", "--q", "11", "--suite", "klingen"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--deep"));
}

#[test]
fn orbit_counts_q7() {
    let out = run(&["verify", "--suite", "orbits", "--q", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let counts: Vec<u64> = v["orbits"]["double_cosets"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["count"].as_u64().unwrap())
        .collect();
    assert_eq!(&counts[..4], &[3, 4, 4, 2]);
    assert!(v["siegel"].as_array().unwrap().is_empty());
    assert!(v["decomposability"].is_null());
}

#[test]
fn full_suite_q3_passes_with_22_reports() {
    for gamma in ["1", "2"] {
        let out = run(&["verify", "--suite", "all", "--q", "3", "--gamma", gamma]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        let v = json(&out);
        assert_eq!(v["meta"]["pass"], Value::Bool(true));
        assert_eq!(v["siegel"].as_array().unwrap().len(), 8);
        assert_eq!(v["klingen"].as_array().unwrap().len(), 14);
        assert_eq!(v["decomposability"].as_array().unwrap().len(), 48);
        assert_eq!(v["tables"].as_array().unwrap().len(), 5);
        for key in [
            "meta",
            "orbits",
            "decomposability",
            "tables",
            "siegel",
            "klingen",
        ] {
            assert!(v.get(key).is_some(), "{key}");
        }
    }
}

#[test]
fn reports_round_trip_and_revalidate() {
    let out = run(&["verify", "--suite", "klingen", "--q", "5", "--gamma", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let reports: Vec<sp4_jacquet::jacquet::VerificationReport> =
        serde_json::from_value(v["klingen"].clone()).expect("reports deserialize");
    assert_eq!(reports.len(), 36);
    for r in &reports {
        assert_eq!(r.recheck(), r.verdict);
        assert_eq!(
            r.computed.values().sum::<u64>() > 0,
            r.computed_dimension > 0
        );
    }
}

#[test]
fn output_is_deterministic_and_written_atomically() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let out = run(&[
            "verify",
            "--q",
            "3",
            "--gamma",
            "2",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        assert!(out.stdout.is_empty());
    }
    let (x, y) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(x, y);
    let stray: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(stray.len(), 2);
    assert!(!String::from_utf8_lossy(&x).contains("wall_time_ms"));
}

#[test]
fn timings_are_opt_in() {
    let out = run(&["verify", "--suite", "siegel", "--q", "3", "--timings"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["meta"]["wall_time_ms"].is_number());
    assert!(v["siegel"][0]["wall_time_ms"].is_number());
}

#[test]
fn csv_and_text_formats() {
    let out = run(&[
        "verify",
        "--suite",
        "decomposability",
        "--q",
        "3",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let s = String::from_utf8(out.stdout).unwrap();
    let mut lines = s.lines();
    assert_eq!(lines.next(), Some("section,item,verdict,detail"));
    assert_eq!(lines.clone().count(), 48);
    assert!(lines.all(|l| l.starts_with("decomposability,") && l.contains(",pass,")));

    let out = run(&[
        "verify", "--suite", "tables", "--q", "5", "--format", "text",
    ]);
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.contains("overall: PASS"));
}

#[test]
fn tables_and_orbits_commands() {
    let out = run(&["tables", "--q", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let groups: Vec<&str> = v["tables"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t["group"].as_str().unwrap())
        .collect();
    assert_eq!(groups, ["GL2", "SL2", "O2C", "T2C", "L"]);
    assert_eq!(v["tables"][0]["rows"].as_array().unwrap().len(), 8);

    let out = run(&["tables", "--q", "3", "--format", "csv"]);
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.lines().any(|l| l.starts_with("SL2,SL2:tau1',")));

    let out = run(&["orbits", "--q", "5", "--gamma", "2", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let s = String::from_utf8(out.stdout).unwrap();
    assert_eq!(s.lines().count(), 1 + 3 + 4 + 4 + 2 + 2);
}

#[test]
fn seed_controls_sampled_checks_only() {
    let a = run(&["verify", "--suite", "orbits", "--q", "5", "--seed", "1"]);
    let b = run(&["verify", "--suite", "orbits", "--q", "5", "--seed", "2"]);
    let (mut va, mut vb) = (json(&a), json(&b));
    assert_eq!(va["meta"]["seed"], 1);
    va["meta"]["seed"] = Value::Null;
    vb["meta"]["seed"] = Value::Null;
    assert_eq!(va, vb);
}

#[test]
fn golden_report_q3() {
    let golden = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden/verify_q3_gamma2.json");
    let out = run(&["verify", "--q", "3", "--gamma", "2"]);
    assert_eq!(out.status.code(), Some(0));
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(golden, &out.stdout).unwrap();
    }
    let expected = std::fs::read_to_string(golden).unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), expected);
}

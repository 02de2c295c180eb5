use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use burgers_lab::harness::{
    parse_spec, run, run_file, CheckReport, ExperimentSpec, HarnessError, BATTERY,
};
use burgers_lab::trig::{enumerate_lattice, FrequencyBasis};
use proptest::prelude::*;
use serde_json::{json, Value};

fn shipped_json(name: &str) -> Value {
    let text = BATTERY.iter().find(|(n, _)| *n == name).unwrap().1;
    serde_json::from_str(text).unwrap()
}

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_burgers-lab"))
        .args(args)
        .output()
        .unwrap()
}

fn write_spec(dir: &Path, name: &str, v: &Value) -> String {
    let p = dir.join(name);
    fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p.to_str().unwrap().to_string()
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

fn small_locality() -> Value {
    let mut v = shipped_json("locality");
    v["solver"]["n_grid"] = json!(256);
    v["solver"]["t_final"] = json!(0.2);
    v
}

#[test]
fn malformed_spec_writes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = tmp.path().join("bad.json");
    fs::write(&spec, "{\"kind\": \"lattice_report\", \"k\": ").unwrap();
    let out = tmp.path().join("out");

    let err = run_file(&spec, &out, None).unwrap_err();
    assert!(matches!(err, HarnessError::ConfigParse(_)), "{err}");
    assert!(!out.exists());

    let o = cli(&["lattice", "--spec", spec.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn unknown_fields_are_rejected() {
    let mut v = shipped_json("lattice");
    v["gap_bond"] = json!(0.1);
    assert!(matches!(
        parse_spec(&v.to_string()),
        Err(HarnessError::ConfigParse(_))
    ));
}

#[test]
fn subcommand_rejects_other_kinds() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = write_spec(tmp.path(), "l.json", &shipped_json("lattice"));
    let o = cli(&["steer", "--spec", &spec, "--out", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn lattice_table_lists_the_lattice() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = write_spec(tmp.path(), "l.json", &json!({"kind": "lattice_report", "k": 3}));
    let out = tmp.path().join("out");
    let o = cli(&["lattice", "--spec", &spec, "--out", out.to_str().unwrap(), "--quiet"]);
    assert_eq!(o.status.code(), Some(0));

    let mut rdr = csv::Reader::from_path(out.join("lattice.csv")).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["n1", "n2", "value", "order"]);
    let mut rows: Vec<(i64, i64)> = rdr
        .records()
        .map(|r| {
            let r = r.unwrap();
            (r[0].parse().unwrap(), r[1].parse().unwrap())
        })
        .collect();
    let mut want: Vec<(i64, i64)> = enumerate_lattice(3, &FrequencyBasis::unit_sqrt2())
        .iter()
        .map(|f| f.coords())
        .collect();
    rows.sort();
    want.sort();
    assert_eq!(rows, want);
    // RFC 4180 line endings
    assert!(fs::read_to_string(out.join("lattice.csv")).unwrap().contains("\r\n"));
}

#[test]
fn exit_status_tracks_the_checks() {
    let tmp = tempfile::tempdir().unwrap();
    for (bound, code) in [(0.1, 0), (1e-3, 1)] {
        let v = json!({"kind": "lattice_report", "k": 30, "gap_window": 5.0, "gap_bound": bound});
        let spec = write_spec(tmp.path(), "l.json", &v);
        let out = tmp.path().join(format!("out{code}"));
        let o = cli(&["lattice", "--spec", &spec, "--out", out.to_str().unwrap(), "--quiet"]);
        assert_eq!(o.status.code(), Some(code));
        let r = report(&out);
        assert_eq!(r["passed"], json!(code == 0));
        let all = r["checks"].as_array().unwrap().iter().all(|c| c["pass"] == json!(true));
        assert_eq!(all, code == 0);
    }
}

#[test]
fn stored_pass_flags_are_recomputable() {
    for name in ["lattice", "sweep_cutoff", "simulate_cole_hopf"] {
        let spec = parse_spec(&shipped_json(name).to_string()).unwrap();
        let outcome = run(&spec).unwrap();
        assert!(!outcome.checks().is_empty());
        for c in outcome.checks() {
            assert!(c.consistent(), "{name}: {c:?}");
            assert_eq!(c.provenance, outcome.provenance);
        }
        let j = outcome.report_json();
        for c in j["checks"].as_array().unwrap() {
            let back: CheckReport = serde_json::from_value(c.clone()).unwrap();
            assert!(back.consistent());
        }
    }
}

#[test]
fn identical_data_has_no_far_field_effect() {
    let mut v = small_locality();
    v["amplitude"] = json!(0.0);
    let ExperimentSpec::LocalityStudy(s) = parse_spec(&v.to_string()).unwrap() else {
        unreachable!()
    };
    for (_, e) in burgers_lab::harness::locality_effects(&s).unwrap() {
        assert_eq!(e, 0.0);
    }
}

#[test]
fn cutoff_sweep_is_exact_inside_the_plateau() {
    let mut v = shipped_json("sweep_cutoff");
    v["sweep"]["rho"] = json!(1.0);
    v["sweep"]["values"] = json!([8, 1, 4, 2]);
    let spec = parse_spec(&v.to_string()).unwrap();
    let outcome = run(&spec).unwrap();
    let rows = outcome.output.data["sweep"]["rows"].as_array().unwrap();
    let values: Vec<f64> = rows.iter().map(|r| r["value"].as_f64().unwrap()).collect();
    assert_eq!(values, vec![1.0, 2.0, 4.0, 8.0]);
    for r in rows {
        assert_eq!(r["error"].as_f64().unwrap(), 0.0);
    }
    assert!(outcome.passed());
}

#[test]
fn outputs_are_byte_identical_and_seeded() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = write_spec(tmp.path(), "loc.json", &small_locality());
    let go = |dir: &str, seed: &str| {
        let out = tmp.path().join(dir);
        let o = cli(&["verify", "--spec", &spec, "--out", out.to_str().unwrap(), "--seed", seed, "--quiet"]);
        assert!(o.status.code().unwrap() <= 1);
        (
            fs::read(out.join("report.json")).unwrap(),
            fs::read(out.join("locality.csv")).unwrap(),
        )
    };
    let a = go("a", "7");
    let b = go("b", "7");
    let c = go("c", "8");
    assert_eq!(a, b);
    assert_ne!(a.1, c.1);
    let r: Value = serde_json::from_slice(&a.0).unwrap();
    assert_eq!(r["data"]["rng_seed"], json!(7));
}

#[test]
fn simulate_writes_plot_ready_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("sim");
    let o = cli(&["simulate", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.lines().any(|l| l.starts_with("PASS simulate/cole_hopf_sup_error")));
    for f in ["report.json", "steps.csv", "trajectory.csv"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let traj = fs::read_to_string(out.join("trajectory.csv")).unwrap();
    assert!(traj.starts_with("t,x,u\r\n"));
}

proptest! {
    #[test]
    fn pass_flag_follows_the_sides(lhs in -1e3f64..1e3, rhs in -1e3f64..1e3, slack in 0.0f64..10.0) {
        let weak = CheckReport::new("w", lhs, rhs, slack);
        prop_assert_eq!(weak.pass, lhs <= rhs + slack);
        prop_assert!(weak.consistent());
        let strict = CheckReport::strict("s", lhs, rhs);
        prop_assert_eq!(strict.pass, lhs < rhs);
        prop_assert!(strict.consistent());
    }
}

use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).to_string_lossy().into_owned()
}

fn netkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netkit")).args(args).env_remove("NETKIT_TOLERANCE").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let o = netkit(&all);
    (serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(&o))), code(&o))
}

#[test]
fn wheatstone_has_sixteen_trees() {
    let o = netkit(&["kirchhoff", "--trees", &data("wheatstone.net")]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("trees: 16"), "{}", stdout(&o));
    assert!(stdout(&o).contains("kappa: -40 + 204 j"));
}

#[test]
fn exact_impedance_prints_common_denominator() {
    let o = netkit(&["--mode", "exact", "impedance", &data("wheatstone.net"), "1", "3"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "Z(1,3) = 500/54020 + 5251/54020 j");
    let (v, _) = json(&["--exact", "impedance", &data("wheatstone.net"), "1", "4"]);
    assert_eq!(v["results"]["impedance"], serde_json::json!({"re": "100/2701", "im": "510/2701"}));
}

#[test]
fn foster_check_passes_exactly() {
    let o = netkit(&["--exact", "check", "--foster", &data("wheatstone.net")]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("residual: 0e0, expected n-1=3"), "{}", stdout(&o));
}

#[test]
fn metric_scan_exits_two_on_violation() {
    let (v, c) = json(&["--exact", "check", &data("wheatstone.net"), "--metric", "0", "pi/4", "pi/2"]);
    assert_eq!(c, 2);
    let triples: Vec<(f64, Value)> = v["violations"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| (x["detail"]["theta"].as_f64().unwrap(), x["detail"]["triple"].clone()))
        .collect();
    let has = |theta: f64| {
        triples.iter().any(|(t, tr)| (*t - theta).abs() < 1e-12 && *tr == serde_json::json!(["1", "3", "4"]))
    };
    assert!(has(0.0) && has(std::f64::consts::FRAC_PI_4) && !has(std::f64::consts::FRAC_PI_2));

    let (v, c) = json(&["--exact", "check", &data("reflected.net"), "--metric", "0,pi/2"]);
    assert_eq!(c, 2);
    for x in v["violations"].as_array().unwrap() {
        assert_eq!(x["detail"]["theta"].as_f64().unwrap(), std::f64::consts::FRAC_PI_2);
    }
    let o = netkit(&["--exact", "check", &data("reflected.net"), "--metric", "0"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn default_check_runs_foster_and_structure() {
    let o = netkit(&["check", &data("ladder.net"), "--omega", "3"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("foster residual") && out.contains("structure: symmetric=true"), "{out}");
}

#[test]
fn jacobi_and_tellegen_pass() {
    let o = netkit(&["check", "--jacobi", "--tellegen", &data("generator.net")]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let o = netkit(&["--exact", "check", "--tellegen", &data("divider.net")]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn solve_with_voltage_source() {
    for mode in ["float64", "exact"] {
        let (v, c) = json(&["--mode", mode, "solve", &data("divider.net"), "--ground", "gnd"]);
        assert_eq!(c, 0);
        let volts: Vec<&Value> =
            v["results"]["voltages"].as_array().unwrap().iter().map(|x| &x["voltage"]["re"]).collect();
        let cur = &v["results"]["voltage_source_currents"][0]["current"]["re"];
        if mode == "exact" {
            assert_eq!(volts, ["6", "4", "0"]);
            assert_eq!(cur, "2");
        } else {
            assert_eq!(volts, [6.0, 4.0, 0.0]);
            assert_eq!(cur.as_f64(), Some(2.0));
        }
    }
}

#[test]
fn sensitivity_matches_finite_difference() {
    let (v, c) = json(&["sensitivity", &data("wheatstone.net"), "1", "2", "--branch", "alpha"]);
    assert_eq!(c, 0);
    assert!(v["residuals"]["relative_gap"].as_f64().unwrap() < 1e-5);
    let o = netkit(&["sensitivity", &data("wheatstone.net"), "1", "2", "--branch", "nope"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn modifications_match_direct_cofactors() {
    let w = data("wheatstone.net");
    for extra in [
        vec!["--contract", "1", "2"],
        vec!["--delete", "tau"],
        vec!["--augment", "1", "2", "3-1j"],
        vec!["--expand", "2", "1/2"],
    ] {
        let mut args = vec!["--json", "--exact", "modify", w.as_str()];
        args.extend(extra.iter().copied());
        let o = netkit(&args);
        assert_eq!(code(&o), 0, "{}", stdout(&o));
        let v: Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(v["residuals"]["kappa"], serde_json::json!({"re": "0", "im": "0"}));
    }
    assert_eq!(code(&netkit(&["modify", &w])), 1);
}

#[test]
fn reduce_keeps_the_other_side() {
    let (v, c) = json(&["--exact", "reduce", &data("twosided.net"), "--port", "p", "q"]);
    assert_eq!(c, 0);
    assert_eq!(v["results"]["decomposition"], serde_json::json!({"a": ["x"], "b": ["z"]}));
    assert_eq!(v["results"]["admittance"], serde_json::json!({"re": "4/5", "im": "0"}));
    assert_eq!(v["residuals"]["kept_side_voltage_gap"], 0.0);

    let (v, c) = json(&["--exact", "reduce", &data("divider.net"), "--vsrc", "V1"]);
    assert_eq!(c, 0);
    assert_eq!(v["residuals"]["pinned_solve_gap"], 0.0);

    // A bridge has no separating port.
    let (_, c) = json(&["reduce", &data("wheatstone.net"), "--port", "1", "2"]);
    assert_eq!(c, 2);
}

#[test]
fn prcheck_on_lossless_and_lossy() {
    let (v, c) = json(&["prcheck", &data("ladder.net"), "a", "gnd"]);
    assert_eq!(c, 0);
    assert_eq!(v["results"]["positive_real"], true);
    assert_eq!(v["results"]["reactance"]["reactance"], true);
    let (v, c) = json(&["prcheck", &data("lossy.net"), "a", "gnd"]);
    assert_eq!(c, 0);
    assert_eq!(v["results"]["impedance"], "(s^2 + 2 s + 2) / (s + 1)");
}

#[test]
fn phase_angles_peak_at_the_generator() {
    let (v, c) = json(&["phase", &data("generator.net"), "--ground", "gnd"]);
    assert_eq!(c, 0, "{v}");
    assert_eq!(v["results"]["max_nodes"], serde_json::json!(["g"]));
    assert!(v["residuals"]["node_power_balance"].as_f64().unwrap() < 1e-9);
}

#[test]
fn phase_rejects_a_capacitive_branch() {
    let (_, c) = json(&["phase", &data("ladder.net"), "--omega", "1", "--ground", "gnd"]);
    assert_eq!(c, 2);
}

#[test]
fn errors_exit_one_with_location() {
    let o = netkit(&["parse", &data("bad.net")]);
    assert_eq!(code(&o), 1);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.net:2:17:"), "{err}");
    assert_eq!(code(&netkit(&["parse", &data("missing.net")])), 1);
    assert_eq!(code(&netkit(&["impedance", &data("wheatstone.net"), "1", "9"])), 1);
    assert_eq!(code(&netkit(&["frobnicate"])), 1);
    assert_eq!(code(&netkit(&["ymatrix", &data("ladder.net")])), 1);
    assert_eq!(code(&netkit(&["--help"])), 0);
}

#[test]
fn reads_standard_input() {
    use std::io::Write;
    let mut child = Command::new(env!("CARGO_BIN_EXE_netkit"))
        .args(["--exact", "impedance", "-", "a", "b"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"branch r a b y=4\n").unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(stdout(&o).trim(), "Z(a,b) = 1/4");
}

#[test]
fn tolerance_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_netkit"))
        .args(["--json", "check", "--foster", &data("wheatstone.net")])
        .env("NETKIT_TOLERANCE", "1e-6")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["inputs"]["tolerance"], 1e-6);
    let o = Command::new(env!("CARGO_BIN_EXE_netkit"))
        .args(["check", &data("wheatstone.net")])
        .env("NETKIT_TOLERANCE", "lots")
        .output()
        .unwrap();
    assert_eq!(code(&o), 1);
}

#[test]
fn parse_round_trips() {
    let o = netkit(&["parse", &data("generator.net")]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("nodes: 4, branches: 6, sources: 1"), "{}", stdout(&o));
}

#[test]
fn output_is_deterministic() {
    let args = ["--json", "kirchhoff", "--trees", &data("wheatstone.net")];
    assert_eq!(netkit(&args).stdout, netkit(&args).stdout);
}

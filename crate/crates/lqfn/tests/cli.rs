use std::process::{Command, Output};

use serde_json::Value;

fn lqfn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lqfn")).args(args).output().unwrap()
}

fn ok_stdout(args: &[&str]) -> String {
    let out = lqfn(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&ok_stdout(args)).unwrap()
}

/// `[re, im]` of the `(0, 0)` entry of `v[key][part]`.
fn entry(v: &Value, key: &str, part: &str) -> (f64, f64) {
    let z = &v[key][part][0][0];
    (z[0].as_f64().unwrap(), z[1].as_f64().unwrap())
}

fn close(a: (f64, f64), b: (f64, f64), tol: f64) -> bool {
    (a.0 - b.0).hypot(a.1 - b.1) <= tol
}

#[test]
fn reduce_fig3() {
    let v = json(&["reduce", "fig3"]);
    assert_eq!(v["channels"], 1);
    assert_eq!(v["modes"], 1);
    assert!(close(entry(&v, "S0", "minus"), (2.0, 0.0), 1e-12));
    assert!(close(entry(&v, "S0", "plus"), (3f64.sqrt(), 0.0), 1e-12));
    assert!(close(entry(&v, "C0", "plus"), (1.0, 0.0), 1e-12));
    assert!(close(entry(&v, "A0", "minus"), (0.5, 0.0), 1e-12));
    assert!(v["residuals"]["symplectic"].as_f64().unwrap() < 1e-12);
    assert!(v["residuals"]["drift"].as_f64().unwrap() < 1e-12);
    assert!(v["residuals"]["input"].as_f64().unwrap() < 1e-12);
    // A0 has the eigenvalues 1/2 ± 2√3/3, one of them in the right half-plane
    assert_eq!(v["stability"]["hurwitz"], false);
}

#[test]
fn reduce_fig4_is_a_sign_change() {
    let v = json(&["reduce", "fig4"]);
    assert_eq!(v["modes"], 0);
    assert!(close(entry(&v, "S0", "minus"), (-1.0, 0.0), 1e-14));
    assert!(close(entry(&v, "S0", "plus"), (0.0, 0.0), 0.0));
}

#[test]
fn reduce_single_cavity_echoes_it() {
    let v = json(&["reduce", "cavity"]);
    assert_eq!(v["mode_labels"][0], "cav.a");
    assert_eq!(entry(&v, "S0", "minus"), (1.0, 0.0));
    assert_eq!(entry(&v, "C0", "minus"), (2f64.sqrt(), 0.0));
    assert_eq!(entry(&v, "C0", "plus"), (0.0, 0.0));
    assert_eq!(entry(&v, "Omega0", "minus"), (1.0, 0.0));
}

#[test]
fn reduce_reads_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("net.qnet");
    std::fs::write(&path, lqfn::examples::find("dpa").unwrap().text).unwrap();
    let v = json(&["reduce", path.to_str().unwrap()]);
    assert_eq!(v["stability"]["hurwitz"], true);
}

#[test]
fn sweep_dpa_log_grid() {
    let text = ok_stdout(&["sweep", "dpa", "--omega-min", "0.1", "--omega-max", "10", "--points", "5", "--scale", "log"]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 6);
    assert_eq!(
        lines[0],
        "omega,re_0_0,im_0_0,re_0_1,im_0_1,re_1_0,im_1_0,re_1_1,im_1_1,symplectic_residual,pole_flag"
    );
    let omegas = [0.1, 10f64.powf(-0.5), 1.0, 10f64.powf(0.5), 10.0];
    for (row, w) in lines[1..].iter().zip(omegas) {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols.len(), 11);
        assert!((cols[0].parse::<f64>().unwrap() - w).abs() < 1e-14);
        assert!(cols[9].parse::<f64>().unwrap() < 1e-10);
        assert_eq!(cols[10], "0");
        // 17 significant digits
        assert!(cols[1].split('e').next().unwrap().trim_start_matches('-').len() == 18, "{}", cols[1]);
    }
}

#[test]
fn sweep_fig4_at_zero_frequency() {
    let text = ok_stdout(&["sweep", "fig4", "--omega-min", "0", "--omega-max", "1", "--points", "2"]);
    let row: Vec<f64> = text.lines().nth(1).unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(row[0], 0.0);
    assert!((row[1] + 1.0).abs() < 1e-14 && row[2].abs() < 1e-14);
}

#[test]
fn sweep_flags_poles_in_band() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lossless.qnet");
    let text = lqfn::examples::find("cavity").unwrap().text.replace("\"gamma\": 2", "\"gamma\": 0");
    std::fs::write(&path, text).unwrap();
    let out = ok_stdout(&["sweep", path.to_str().unwrap(), "--omega-min", "-2", "--omega-max", "0", "--points", "3"]);
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert!(rows[0].ends_with(",0"));
    assert_eq!(rows[1], "-1.0000000000000000e0,,,,,,,,,,1");
    let v = json(&["sweep", path.to_str().unwrap(), "--omega-min", "-2", "--omega-max", "0", "--points", "3", "--format", "json"]);
    assert_eq!(v["points"][1]["pole"], true);
    assert!(v["points"][1]["value"].is_null());
}

#[test]
fn sweep_usage_errors() {
    for args in [
        &["sweep", "dpa", "--omega-min", "0", "--omega-max", "1", "--points", "1"][..],
        &["sweep", "dpa", "--omega-min", "1", "--omega-max", "1"],
        &["sweep", "dpa", "--omega-min", "-1", "--omega-max", "1", "--scale", "log"],
        &["sweep", "dpa", "--omega-min", "0"],
    ] {
        assert_eq!(lqfn(args).status.code(), Some(64), "{args:?}");
    }
}

#[test]
fn domain_errors_exit_2() {
    let out = lqfn(&["reduce", "no-such-network"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.qnet");
    std::fs::write(&path, "{\"version\": 1,\n oops}").unwrap();
    let out = lqfn(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn tf_at_a_point() {
    let v = json(&["tf", "cavity", "--s", "0,0"]);
    // (−1 + i)/(1 + i) = i
    assert!(close(
        (v["value"][0][0][0].as_f64().unwrap(), v["value"][0][0][1].as_f64().unwrap()),
        (0.0, 1.0),
        1e-15
    ));
    assert_eq!(lqfn(&["tf", "cavity", "--s", "1"]).status.code(), Some(64));
}

#[test]
fn stability_verdicts() {
    let text = ok_stdout(&["stability", "--kind", "dpa", "--params", r#"{"kappa": 2, "epsilon": 1}"#]);
    assert!(text.contains("-1.5000000000000000e0 + 0.0000000000000000e0i"), "{text}");
    assert!(text.contains("-5.0000000000000"), "{text}");
    assert!(text.ends_with("verdict: HURWITZ\n"));
    let text = ok_stdout(&["stability", "--kind", "dpa", "--params", r#"{"kappa": 1, "epsilon": 2}"#]);
    assert!(text.ends_with("verdict: NOT HURWITZ\n"));
    assert!(ok_stdout(&["stability", "fig1"]).contains("verdict:"));
    assert_eq!(lqfn(&["stability"]).status.code(), Some(64));
    assert_eq!(lqfn(&["stability", "--kind", "dpa", "--params", r#"{"kappa": -1, "epsilon": 0}"#]).status.code(), Some(2));
}

#[test]
fn araki_woods_scalar() {
    let v = json(&["araki-woods", "--N", "3", "--M", "2"]);
    let get = |k: &str| v[k][0][0][0].as_f64().unwrap();
    assert!((get("X") - (8.0f64 / 3.0).sqrt()).abs() < 1e-12);
    assert!((get("Y") - 3f64.sqrt()).abs() < 1e-12);
    assert!((get("Z") - 2.0 / 3f64.sqrt()).abs() < 1e-12);
    assert!(v["dilation_residual"].as_f64().unwrap() < 1e-12);
    assert!(v["moment_residual"].as_f64().unwrap() < 1e-12);
    let v = json(&["araki-woods", "--N", "[[1, 0], [0, 0.5]]", "--M", "[[0, 0], [0, 0]]"]);
    assert_eq!(v["kept_modes"].as_array().unwrap().len(), 2);
    // N(N + 1) < |M|^2 is not a state
    assert_eq!(lqfn(&["araki-woods", "--N", "1", "--M", "5"]).status.code(), Some(2));
}

#[test]
fn shale_of_identity_and_squeezers() {
    let v = json(&["shale", "--kind", "identity", "--params", r#"{"channels": 1}"#]);
    assert_eq!(v["r_diag"][0].as_f64().unwrap(), 0.0);
    assert!(v["recomposition_residual"].as_f64().unwrap() < 1e-15);
    let v = json(&["shale", "--s", r#"{"minus": [[2]], "plus": [[1.7320508075688772]]}"#]);
    assert!((v["r_diag"][0].as_f64().unwrap() - 2f64.acosh()).abs() < 1e-12);
    // fig3's reduced scattering matrix is the same squeezer
    let w = json(&["shale", "fig3"]);
    assert!((w["r_diag"][0].as_f64().unwrap() - 2f64.acosh()).abs() < 1e-12);
    assert_eq!(lqfn(&["shale", "--s", r#"{"minus": [[1]], "plus": [[1]]}"#]).status.code(), Some(2));
}

#[test]
fn dpa_limit() {
    let v = json(&["limit", "--kind", "dpa", "--k", "1e6"]);
    assert!(v["residual"].as_f64().unwrap() < 1e-4);
    let r0 = 2f64.ln();
    assert!((v["r0"].as_f64().unwrap() - r0).abs() < 1e-15);
    assert!((v["quadrature_gains"][0].as_f64().unwrap() + r0.exp()).abs() < 1e-14);
    assert!((v["quadrature_gains"][1].as_f64().unwrap() + (-r0).exp()).abs() < 1e-14);
    let coarse = json(&["limit", "--kind", "dpa", "--k", "10"]);
    assert!(coarse["residual"].as_f64().unwrap() > v["residual"].as_f64().unwrap());
}

#[test]
fn examples_listing() {
    let text = ok_stdout(&["examples"]);
    for name in ["fig1", "fig3", "fig4", "dpa", "cavity", "squeezed_cavity"] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name}");
    }
    assert_eq!(ok_stdout(&["examples", "fig4"]), lqfn::examples::find("fig4").unwrap().text);
    assert_eq!(lqfn(&["examples", "fig9"]).status.code(), Some(64));
}

#[test]
fn validate_reports_the_shape() {
    let text = ok_stdout(&["validate", "fig3"]);
    assert!(text.starts_with("ok: 3 components"), "{text}");
    assert!(text.contains("(1 delayed)"));
}

#[test]
fn help_and_version_exit_0() {
    assert_eq!(lqfn(&["--help"]).status.code(), Some(0));
    assert_eq!(lqfn(&["--version"]).status.code(), Some(0));
    assert_eq!(lqfn(&[]).status.code(), Some(64));
    assert_eq!(lqfn(&["frobnicate"]).status.code(), Some(64));
}

#[test]
fn outputs_are_deterministic() {
    for args in [
        &["reduce", "fig1"][..],
        &["sweep", "squeezed_cavity", "--omega-min", "-3", "--omega-max", "3", "--points", "31"],
        &["stability", "fig3"],
        &["araki-woods", "--N", "3", "--M", "2"],
    ] {
        assert_eq!(lqfn(args).stdout, lqfn(args).stdout, "{args:?}");
    }
}

#[test]
fn run_is_usable_as_a_library() {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = lqfn::cli::run(["lqfn", "validate", "fig4"], &mut out, &mut err);
    assert_eq!(code, 0);
    assert!(String::from_utf8(out).unwrap().starts_with("ok: 1 components"));
    assert!(err.is_empty());
}

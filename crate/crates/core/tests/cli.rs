use std::path::Path;
use std::process::{Command, Output};

use oam_memory::output::{from_csv, from_json};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oam-memory"))
        .args(args)
        .env_remove("OAM_MEMORY_CONFIG")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Value of a `key = value` report line.
fn field(out: &Output, key: &str) -> f64 {
    stdout(out)
        .lines()
        .find_map(|line| {
            let (k, v) = line.split_once('=')?;
            (k.trim() == key).then(|| v.trim().parse().unwrap())
        })
        .unwrap_or_else(|| panic!("no `{key}` in output:\n{}", stdout(out)))
}

#[test]
fn xi_verify_agrees_with_quadrature() {
    for args in [["1", "0", "0", "1"], ["3", "2", "4", "0.5"], ["0", "5", "1", "2.5"]] {
        let out = run(&["xi", "--l", args[0], "--p", args[1], "--pp", args[2], "--gamma", args[3], "--verify"]);
        assert!(out.status.success());
        assert!(field(&out, "difference") <= 1e-8);
    }
}

#[test]
fn argument_errors_exit_2() {
    assert_eq!(run(&["xi", "--l", "1", "--p", "0", "--pp", "0", "--gamma", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["xi", "--l", "1"]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "--figure", "fig6"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn config_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");
    for body in ["kappa_hz = -1\n", "colour = blue\n", "gamma = 0.1\ngamma = 0.2\n", "not a pair\n"] {
        std::fs::write(&bad, body).unwrap();
        let out = run(&["--config", bad.to_str().unwrap(), "fidelity", "--l", "1"]);
        assert_eq!(out.status.code(), Some(3), "{body:?}");
    }
}

#[test]
fn missing_config_file_falls_back_to_defaults() {
    let out = run(&["--config", "/nonexistent/oam.cfg", "xi", "--l", "0", "--p", "0", "--pp", "0", "--gamma", "0.1"]);
    assert!(out.status.success());
    assert!(!out.stderr.is_empty());
}

#[test]
fn perfect_transfer_without_noise() {
    let out = run(&["fidelity", "--l", "0", "--n-m", "0", "--alpha", "0"]);
    assert!(out.status.success());
    assert_eq!(field(&out, "fidelity"), 1.0);
    assert_eq!(field(&out, "n"), 0.0);
}

#[test]
fn presets_change_photon_number() {
    let caption = run(&["--preset", "fig5-caption", "fidelity", "--l", "1", "--n-m", "10"]);
    let body = run(&["--preset", "body-text", "fidelity", "--l", "1", "--n-m", "10"]);
    // n ∝ 1/√n_c, and the presets differ by a factor 2 in n_c.
    let ratio = field(&body, "n") / field(&caption, "n");
    assert!((ratio - 2f64.sqrt()).abs() < 1e-12, "{ratio}");
}

#[test]
fn optimize_finds_interior_optimum_for_l6() {
    let out = run(&["optimize", "--l", "6", "--objective", "coupling"]);
    assert!(out.status.success());
    assert_eq!(field(&out, "best_p"), 35.0);
    assert_eq!(field(&out, "best_p_prime"), 0.0);
    assert!(stdout(&out).contains("boundary_flag  = false"));
}

#[test]
fn gamma_opt_matches_closed_form() {
    let out = run(&["gamma-opt", "--l", "4"]);
    assert!((field(&out, "gamma_numeric") - 1.6).abs() < 1e-6);
}

fn sweep_to(path: &Path, extra: &[&str]) {
    let mut args = vec!["sweep", "--out", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    let out = run(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn sweeps_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for extra in [
        &["--figure", "fig3", "--l", "0,6", "--p-max", "6", "--pp-max", "6"][..],
        &["--figure", "fig5", "--p-max", "8", "--pp-max", "8", "--n-m", "100", "--format", "json"][..],
    ] {
        let (a, b) = (dir.path().join("a"), dir.path().join("b"));
        sweep_to(&a, extra);
        sweep_to(&b, extra);
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    }
}

#[test]
fn fig3_grid_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig3.csv");
    sweep_to(&path, &["--figure", "fig3", "--l", "6", "--p-max", "10", "--pp-max", "10"]);
    let rows = from_csv(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(rows.len(), 121);
    assert!(rows.iter().all(|r| r.l == 6 && r.fidelity.is_none()));
}

#[test]
fn json_dataset_carries_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig4b.json");
    sweep_to(&path, &["--figure", "fig4b", "--l", "0,2", "--p-max", "5", "--pp-max", "5", "--n-m", "50", "--format", "json"]);
    let ds = from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(ds.metadata.l_values, vec![0, 2]);
    assert_eq!(ds.metadata.config_hash.len(), 64);
    assert_eq!(ds.metadata.transfer.unwrap().n_m, 50.0);
    assert_eq!(ds.rows.len(), 2);
    assert!(ds.rows.iter().all(|r| r.fidelity.is_some()));
}

#[test]
fn fig4a_dominates_fig2() {
    let dir = tempfile::tempdir().unwrap();
    let (two, four) = (dir.path().join("2.csv"), dir.path().join("4.csv"));
    sweep_to(&two, &["--figure", "fig2"]);
    sweep_to(&four, &["--figure", "fig4a", "--p-max", "20", "--pp-max", "20"]);
    let two = from_csv(&std::fs::read_to_string(two).unwrap()).unwrap();
    let four = from_csv(&std::fs::read_to_string(four).unwrap()).unwrap();
    assert_eq!(two.len(), four.len());
    for (a, b) in four.iter().zip(&two) {
        assert_eq!(a.l, b.l);
        assert!(a.xi.abs() >= b.xi.abs());
    }
}

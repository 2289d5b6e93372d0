use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn selfsim(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_selfsim"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    (header, rows)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn dispersion_at_zero_wavenumber() {
    let dir = tempfile::tempdir().unwrap();
    let o = selfsim(dir.path(), &["dispersion", "--delta", "1", "--h", "1", "--zeta", "1", "--k", "0", "--out", "o"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (header, rows) = read_csv(&dir.path().join("o/dispersion.csv"));
    assert_eq!(header, ["k", "omega2", "omega2_quadrature"]);
    assert_eq!(rows, vec![vec![0.0, 0.0, 0.0]]);
    let env: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("o/dispersion.json")).unwrap()).unwrap();
    assert_eq!(env["command"], "dispersion");
    assert_eq!(env["config_hash"].as_str().unwrap().len(), 64);
    assert_eq!(env["input"]["params"]["delta"], 1.0);
    assert!(env.get("wall_time").is_none());
    assert!(stderr(&o).contains("wall_time_s="));
}

#[test]
fn cauchy_diffusion_peak() {
    let dir = tempfile::tempdir().unwrap();
    let o = selfsim(dir.path(), &["diffusion", "--delta", "1", "--t", "1", "--grid", "131072,0.25", "--out", "o"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (header, rows) = read_csv(&dir.path().join("o/diffusion.csv"));
    assert_eq!(header, ["x", "w_t1", "lorentzian_t1"]);
    let origin = rows.iter().find(|r| r[0] == 0.0).unwrap();
    assert!((origin[1] - 1.0 / (PI * PI)).abs() < 1e-8);
    assert!(rows.iter().all(|r| (r[1] - r[2]).abs() < 1e-8));
    let script = fs::read_to_string(dir.path().join("o/diffusion.gp")).unwrap();
    assert!(script.contains("\"diffusion.csv\""));
    assert!(script.contains("c=2:3"));
}

#[test]
fn tail_fit_writes_loglog_script_with_slope() {
    let dir = tempfile::tempdir().unwrap();
    let o = selfsim(dir.path(), &["diffusion", "--delta", "0.5", "--t", "1", "--grid", "1024,0.1", "--tail", "--out", "o"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let env: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("o/diffusion.json")).unwrap()).unwrap();
    let slope = env["results"]["tail"]["slope"].as_f64().unwrap();
    assert!((slope + 1.5).abs() < 0.05);
    let script = fs::read_to_string(dir.path().join("o/diffusion-tail.gp")).unwrap();
    assert!(script.contains("set logscale xy"));
    assert!(script.contains(&format!("slope = {slope:?}")));
}

#[test]
fn invalid_delta_is_a_validation_error_with_no_files() {
    let dir = tempfile::tempdir().unwrap();
    for cmd in ["dispersion", "diffusion", "mc", "kernels"] {
        let o = selfsim(dir.path(), &[cmd, "--delta", "2.5", "--out", "o"]);
        assert_eq!(o.status.code(), Some(1));
        assert!(stderr(&o).starts_with("error[DeltaOutOfRange]"), "{}", stderr(&o));
        assert!(!dir.path().join("o").exists());
    }
}

#[test]
fn config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.json"), r#"{"params": {"delta": 0.5, "beta": 1}}"#).unwrap();
    let o = selfsim(dir.path(), &["dispersion", "--config", "bad.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error[InvalidConfig]"));
    let o = selfsim(dir.path(), &["dispersion", "--config", "missing.json"]);
    assert_eq!(o.status.code(), Some(1));
    let o = selfsim(dir.path(), &["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error[UsageError]"));
    let o = selfsim(dir.path(), &["diffusion", "--grid", "abc"]);
    assert_eq!(o.status.code(), Some(1));
    let o = selfsim(dir.path(), &["potentials", "--alpha", "-3", "--out", "o"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error[ExcludedAlpha]"));
    assert!(!dir.path().join("o").exists());
}

#[test]
fn numeric_failure_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.json"), r#"{"quadrature": {"max_subdivisions": 1, "abs_tol": 1e-15, "rel_tol": 1e-15}}"#)
        .unwrap();
    let o = selfsim(dir.path(), &["dispersion", "--config", "c.json", "--delta", "0.3", "--k", "7", "--out", "o"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).starts_with("error[QuadratureNoConvergence]"));
    assert!(!dir.path().join("o").exists());
}

#[test]
fn identical_configs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("run.json"),
        r#"{"params": {"delta": 0.7}, "grid": {"n": 512, "dx": 0.1}, "mc": {"samples": 70000, "ks": false}, "seed": 99}"#,
    )
    .unwrap();
    for cmd in ["mc", "diffusion", "kernels", "cauchy", "potentials"] {
        let a = selfsim(dir.path(), &[cmd, "--config", "run.json", "--out", "a"]);
        let b = selfsim(dir.path(), &[cmd, "--config", "run.json", "--out", "b"]);
        assert_eq!(a.status.code(), Some(0), "{cmd}: {}", stderr(&a));
        assert_eq!(b.status.code(), Some(0));
    }
    let mut names: Vec<_> = fs::read_dir(dir.path().join("a")).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() >= 15);
    for name in names {
        let x = fs::read(dir.path().join("a").join(&name)).unwrap();
        let y = fs::read(dir.path().join("b").join(&name)).unwrap();
        assert_eq!(x, y, "{name:?}");
    }
    // a different seed changes the samples and the hash
    let c = selfsim(dir.path(), &["mc", "--config", "run.json", "--seed", "100", "--out", "c"]);
    assert_eq!(c.status.code(), Some(0));
    assert_ne!(fs::read(dir.path().join("a/mc.csv")).unwrap(), fs::read(dir.path().join("c/mc.csv")).unwrap());
}

#[test]
fn empty_point_list_gives_header_only_csv() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("e.json"), r#"{"params": {"delta": 0.5}, "greens_static": {"x": []}}"#).unwrap();
    let o = selfsim(dir.path(), &["greens-static", "--config", "e.json", "--out", "o"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(fs::read_to_string(dir.path().join("o/greens-static.csv")).unwrap(), "x,g\n");
}

#[test]
fn monte_carlo_csv_and_ks() {
    let dir = tempfile::tempdir().unwrap();
    let o = selfsim(dir.path(), &["mc", "--delta", "1", "--samples", "20000", "--seed", "5", "--out", "o"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("o/mc.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "# delta=1");
    assert_eq!(lines[2], "# seed=5");
    assert_eq!(lines[3], "x");
    assert_eq!(lines.len(), 4 + 20_000);
    let env: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("o/mc.json")).unwrap()).unwrap();
    assert!(env["results"]["ks_distance"].as_f64().unwrap() < 0.02);
    assert_eq!(env["provenance"]["seed"], 5);
}

#[test]
fn potentials_plot_one_curve_per_alpha() {
    let dir = tempfile::tempdir().unwrap();
    let o = selfsim(dir.path(), &["potentials", "--alpha", "-0.5,0.5,1.5,2", "--x", "-1,0.5,1", "--out", "o"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (header, rows) = read_csv(&dir.path().join("o/potentials.csv"));
    assert_eq!(header, ["x", "b_alpha-0.5", "b_alpha0.5", "b_alpha1.5", "b_alpha2"]);
    assert_eq!(rows[0][1..], rows[2][1..]);
    assert_eq!(rows[1][4], 0.0);
    assert!((rows[2][2] + 0.199_471_140_200_716_35).abs() < 1e-12);
    let script = fs::read_to_string(dir.path().join("o/potentials.gp")).unwrap();
    assert!(script.contains("c=2:5"));
    let env: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("o/potentials.json")).unwrap()).unwrap();
    for c in env["results"]["compensation"].as_array().unwrap() {
        assert!(c["sum"].as_f64().unwrap().abs() < 1e-12);
    }
}

#[test]
fn remaining_commands_run() {
    let dir = tempfile::tempdir().unwrap();
    let grid = ["--grid", "1024,0.05"];
    let runs: [&[&str]; 5] = [
        &["laplacian", "--delta", "0.8", "--function", "cosine", "--k0", "1.5", "--x", "0,0.4"],
        &["cauchy", "--delta", "1.2", "--t", "0.5,1,2"],
        &["kernels", "--delta", "1.5", "--t", "1", "--x", "1,2"],
        &["helmholtz", "--delta", "0.5", "--omega", "1", "--eps", "0.1"],
        &["greens-static", "--delta", "1.5", "--x", "-2,1,3"],
    ];
    for args in runs {
        let mut all: Vec<&str> = args.to_vec();
        all.extend(grid);
        all.extend(["--out", "o"]);
        let o = selfsim(dir.path(), &all);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stderr(&o));
    }
    let (_, rows) = read_csv(&dir.path().join("o/laplacian-pointwise.csv"));
    for r in rows {
        assert!((r[1] - r[2]).abs() < 1e-4 * r[2].abs().max(1e-3));
    }
    let env: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("o/cauchy.json")).unwrap()).unwrap();
    assert!(env["results"]["max_relative_energy_drift"].as_f64().unwrap() < 1e-12);
    let (header, _) = read_csv(&dir.path().join("o/kernels-series.csv"));
    assert_eq!(header.len(), 5);
    let o = selfsim(dir.path(), &["greens-static", "--delta", "1", "--out", "p"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error[DeltaPole]"));
}

#[test]
fn no_plot_skips_scripts() {
    let dir = tempfile::tempdir().unwrap();
    let o = selfsim(dir.path(), &["dispersion", "--no-plot", "--out", "o"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(!dir.path().join("o/dispersion.gp").exists());
    let env: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("o/dispersion.json")).unwrap()).unwrap();
    assert_eq!(env["plots"].as_array().unwrap().len(), 0);
}

#[test]
fn help_and_version_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = selfsim(dir.path(), &["--help"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8_lossy(&o.stdout);
    for cmd in ["dispersion", "greens-static", "laplacian", "cauchy", "kernels", "helmholtz", "diffusion", "mc", "potentials", "selftest"] {
        assert!(text.contains(cmd), "{cmd}");
    }
    assert_eq!(selfsim(dir.path(), &["--version"]).status.code(), Some(0));
}

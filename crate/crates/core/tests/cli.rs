//! End-to-end CLI runs: config parsing, artifact emission, determinism,
//! exit codes, sweep fan-out. All runs pin --threads 2 so the shared rayon
//! pool (and the reproducibility header) is identical across tests.

use std::fs;
use std::path::{Path, PathBuf};

use spinboson::cli::run_with_args;

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("run.toml");
    fs::write(&path, text).unwrap();
    path
}

fn run(config: &Path, out: &Path, extra: &[&str], cmd: &str) -> i32 {
    let mut args = vec![
        "sbsim",
        "--config",
        config.to_str().unwrap(),
        "--out-dir",
        out.to_str().unwrap(),
        "--threads",
        "2",
    ];
    args.extend_from_slice(extra);
    args.push(cmd);
    run_with_args(args)
}

const SIMULATE: &str = r#"
[spin]
delta_hz = 1.0e5

[[modes]]
omega_m_hz = 1.0e5
lambda_hz = 1.0e5
kappa_hz = 1.25e3
nbar = 0.025
n_max = 5

[grid]
t_max = 1.0e-5
n_points = 32
"#;

fn data_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn simulate_round_trip_and_determinism() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SIMULATE);
    let out_a = tmp.path().join("a");
    let out_b = tmp.path().join("b");
    assert_eq!(run(&cfg, &out_a, &[], "simulate"), 0);
    assert_eq!(run(&cfg, &out_b, &[], "simulate"), 0);
    let a = fs::read(out_a.join("sigma_z.csv")).unwrap();
    let b = fs::read(out_b.join("sigma_z.csv")).unwrap();
    assert_eq!(a, b, "identical runs must be byte-identical");

    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("# config_sha256: "));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 32);
    assert_eq!(rows[0][0], 0.0);
    assert!((rows[0][1] - 1.0).abs() < 1e-12, "starts in spin up at t = 0");
    for w in rows.windows(2) {
        assert!(w[1][0] > w[0][0]);
        assert!(w[1][1].abs() <= 1.0 + 1e-9);
    }
}

#[test]
fn golden_resonant_trajectory() {
    let golden_dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let cfg = golden_dir.join("resonant.toml");
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(run(&cfg, tmp.path(), &[], "simulate"), 0);
    let got = fs::read(tmp.path().join("sigma_z.csv")).unwrap();
    let want = fs::read(golden_dir.join("resonant_sigma_z.csv")).unwrap();
    assert_eq!(got, want, "golden resonant trajectory drifted");
}

#[test]
fn dry_run_writes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SIMULATE);
    let out = tmp.path().join("out");
    assert_eq!(run(&cfg, &out, &["--dry-run"], "simulate"), 0);
    assert!(!out.join("sigma_z.csv").exists());
}

#[test]
fn config_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let bad = write_config(tmp.path(), &SIMULATE.replace("t_max", "t_mux"));
    assert_eq!(run(&bad, &out, &[], "simulate"), 2);

    // missing config flag entirely
    assert_eq!(run_with_args(["sbsim", "simulate"]), 2);
}

#[test]
fn strict_regime_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let overdamped = write_config(tmp.path(), &SIMULATE.replace("1.25e3", "2.0e5"));
    assert_eq!(run(&overdamped, &out, &["--strict-regime"], "simulate"), 2);
    // relaxed mode still runs
    assert_eq!(run(&overdamped, &out, &[], "simulate"), 0);
}

#[test]
fn dimension_cap_exit_4() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let big = write_config(tmp.path(), &SIMULATE.replace("n_max = 5", "n_max = 40"));
    assert_eq!(run(&big, &out, &[], "simulate"), 4);
}

#[test]
fn sweep_fans_out_sorted_files() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = write_config(
        tmp.path(),
        r#"
[[components]]
lambda_hz = 1.0e5
kappa_hz = 1.25e3
omega_m_hz = 1.0e5

[grid]
omega_max_hz = 2.0e5
n_points = 50
"#,
    );
    let code = run(
        &cfg,
        &out,
        &["--sweep", "components.0.kappa_hz=2.5e3,1.25e3"],
        "sd",
    );
    assert_eq!(code, 0);
    for v in ["1.25e3", "2.5e3"] {
        let p = out.join(format!("sd_components.0.kappa_hz-{v}.csv"));
        assert!(p.exists(), "missing sweep artifact {p:?}");
    }
}

#[test]
fn corr_and_dist_smoke() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = write_config(
        tmp.path(),
        r#"
[bath]
omega_m_hz = 1.0e5
kappa_hz = 1.25e3
lambda_hz = 1.0e5
nbar = 0.025
n_matsubara = 200

[grid]
t_max = 1.0e-4
n_points = 20
"#,
    );
    assert_eq!(run(&cfg, &out, &[], "corr"), 0);
    let rows = data_rows(&fs::read_to_string(out.join("corr.csv")).unwrap());
    assert_eq!(rows.len(), 20);
    assert_eq!(rows[0].len(), 5);

    let dist_cfg = write_config(
        tmp.path(),
        r#"
kappa_hz = [0.5e3, 1.25e3]
nbar = [0.025, 0.1]

[bath]
omega_m_hz = 1.0e5
lambda_hz = 1.0e5
n_matsubara = 200
"#,
    );
    assert_eq!(run(&dist_cfg, &out, &[], "corr-dist"), 0);
    let rows = data_rows(&fs::read_to_string(out.join("dist.csv")).unwrap());
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r[2] > 0.0));
}

#[test]
fn nonmarkov_smoke() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = write_config(
        tmp.path(),
        r#"
[spin]
delta_hz = 1.0e5

[[modes]]
omega_m_hz = 1.0e5
lambda_hz = 1.0e5
kappa_hz = 1.25e3
nbar = 0.025
n_max = 3

[grid]
t_max = 5.0e-6
n_points = 40
"#,
    );
    assert_eq!(run(&cfg, &out, &[], "nonmarkov"), 0);
    let text = fs::read_to_string(out.join("nonmarkov.csv")).unwrap();
    assert!(text.contains("# n_rhp: "));
    assert!(text.contains("# n_blp: "));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 40);
    assert_eq!(rows[0].len(), 5, "t, g, and three pair distances");
}

#[test]
fn ion_params_smoke() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = write_config(
        tmp.path(),
        r#"
[crystal]
mass_1_amu = 24.0
mass_2_amu = 25.0
omega_com_ref_hz = 2.54e6

[lasers]
wavelength_nm = 280.0
geometry_angle_deg = 90.0
omega_odf_hz = 2.0e4
detuning_delta_m_hz = 1.0e5
big_detuning_hz = 2.0e12
gamma_hz = 2.0e7
rabi_0_hz = 1.0e9

[mode]
kappa_hz = 1.25e3
nbar = 0.025
"#,
    );
    assert_eq!(run(&cfg, &out, &[], "ion-params"), 0);
    let text = fs::read_to_string(out.join("ion_params.csv")).unwrap();
    assert!(text.contains("omega_1_hz,"));
    assert!(text.contains("eta_2,"));
    assert!(text.contains("regime_worst,"));
}

#[test]
fn chain_and_evolve_smoke() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = write_config(
        tmp.path(),
        r#"
n_nodes = 400
n_chain = 8

[[target.components]]
lambda_hz = 1.0e5
kappa_hz = 1.25e3
omega_m_hz = 1.0e5
"#,
    );
    assert_eq!(run(&cfg, &out, &[], "chain"), 0);
    let text = fs::read_to_string(out.join("chain.csv")).unwrap();
    assert!(text.contains("# t0_hz: "));
    assert_eq!(data_rows(&text).len(), 8);

    let ev_cfg = write_config(
        tmp.path(),
        r#"
n_nodes = 400
n_sites = 2
d_max = 3

[spin]
delta_hz = 1.0e5

[[target.components]]
lambda_hz = 1.0e5
kappa_hz = 1.25e3
omega_m_hz = 1.0e5

[grid]
t_max = 2.0e-6
n_points = 16
"#,
    );
    assert_eq!(run(&ev_cfg, &out, &[], "chain-evolve"), 0);
    let rows = data_rows(&fs::read_to_string(out.join("chain_sigma_z.csv")).unwrap());
    assert_eq!(rows.len(), 16);
    assert_eq!(rows[0], [0.0, 1.0]);
}

#[test]
fn sd_fit_smoke() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = write_config(
        tmp.path(),
        r#"
n_components = 1
seed = 11

[[target.components]]
lambda_hz = 5.0e4
kappa_hz = 2.0e3
omega_m_hz = 8.0e4

[grid]
omega_max_hz = 1.6e5
n_points = 200
"#,
    );
    assert_eq!(run(&cfg, &out, &[], "sd-fit"), 0);
    let text = fs::read_to_string(out.join("fit.csv")).unwrap();
    assert!(text.contains("# residual: "));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 1);
    // recovered resonance within a percent
    assert!((rows[0][1] - 8.0e4).abs() / 8.0e4 < 0.01, "{:?}", rows[0]);
}

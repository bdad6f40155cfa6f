//! Batch front-end: parse a TOML run config, dispatch a subcommand, emit
//! deterministic CSV artifacts. No interactive mode — outputs are static
//! curves consumed by external plotting tools.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use faer::c64;
use rayon::prelude::*;
use serde::Serialize;

use crate::chainmap;
use crate::config::{
    self, ChainConfig, ChainEvolveConfig, CorrConfig, CorrDistConfig, IonParamsConfig,
    NonmarkovConfig, SdConfig, SdFitConfig, SimulateConfig,
};
use crate::correlation::{self, BathParams};
use crate::error::{Error, Result};
use crate::iontrap::{self, RabiTable, RamanLasers, RegimeInput, RegimeStatus, TwoIonCrystal};
use crate::lindblad::{self, thermal_state};
use crate::nonmarkov::{self, SpinPair, G_FLOOR};
use crate::output::{self, format_float, ReproHeader};
use crate::spectral::{self, TargetSpectralDensity};
use crate::units::{angular_to_hz, hz_to_angular};

#[derive(Debug, Parser)]
#[command(name = "sbsim", version, about = "spin-boson engineered-environment toolkit")]
pub struct Cli {
    /// run configuration file (TOML)
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// directory for output artifacts
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,

    /// worker thread count (default: all cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// reject configs whose small-parameter regime checks are not clean
    #[arg(long, global = true)]
    pub strict_regime: bool,

    /// validate the config and print the resolved parameters, compute nothing
    #[arg(long, global = true)]
    pub dry_run: bool,

    /// fan a run out over values of one config key: key=v1,v2,...
    #[arg(long, global = true)]
    pub sweep: Option<String>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// tabulate the effective spectral density of a mode set
    Sd,
    /// fit a Lorentzian composite to a target spectral density
    SdFit,
    /// bath correlation function: exact Ohmic vs regression-theorem
    Corr,
    /// correlation-distance d over kappa and nbar lists
    CorrDist,
    /// Lindblad evolution of spin + damped modes; emits sigma_z(t)
    Simulate,
    /// dynamical-map reconstruction and non-Markovianity measures
    Nonmarkov,
    /// two-ion crystal knobs: modes, Lamb-Dicke, effective Rabi, scattering
    IonParams,
    /// chain-map coefficients of a spectral density
    Chain,
    /// exact spin + truncated-chain evolution (zero temperature)
    ChainEvolve,
}

/// Entry point for the binary: parse argv, run, map errors to exit codes.
pub fn run() -> i32 {
    run_cli(Cli::parse())
}

/// Same as `run`, for tests driving the CLI in-process.
pub fn run_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run_cli(cli),
        Err(e) => {
            eprint!("{e}");
            2
        }
    }
}

fn run_cli(cli: Cli) -> i32 {
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        // ignore AlreadyInitialized: the pool can only be set once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let path = cli.config.as_ref().ok_or_else(|| Error::Config {
        key: "--config".into(),
        reason: "a config file is required".into(),
    })?;
    let text = std::fs::read_to_string(path)?;
    std::fs::create_dir_all(&cli.out_dir)?;

    match &cli.sweep {
        None => run_point(cli, &text, None),
        Some(spec) => {
            let (key, values) = parse_sweep(spec)?;
            let base: toml::Value = toml::from_str(&text).map_err(|e| Error::Config {
                key: "config".into(),
                reason: e.message().to_string(),
            })?;
            let results: Vec<Result<()>> = values
                .par_iter()
                .map(|v| {
                    let mut point = base.clone();
                    apply_override(&mut point, &key, v)?;
                    let point_text = toml::to_string(&point).map_err(|e| Error::Config {
                        key: key.clone(),
                        reason: e.to_string(),
                    })?;
                    run_point(cli, &point_text, Some(&format!("{key}-{v}")))
                })
                .collect();
            results.into_iter().collect()
        }
    }
}

/// `key=v1,v2,...` → (key, values sorted numerically when possible)
fn parse_sweep(spec: &str) -> Result<(String, Vec<String>)> {
    let bad = |reason: &str| Error::Config { key: "--sweep".into(), reason: reason.into() };
    let (key, vals) = spec.split_once('=').ok_or_else(|| bad("expected key=v1,v2,..."))?;
    let mut values: Vec<String> =
        vals.split(',').map(str::trim).filter(|v| !v.is_empty()).map(String::from).collect();
    if key.trim().is_empty() || values.is_empty() {
        return Err(bad("expected key=v1,v2,..."));
    }
    values.sort_by(|a, b| match (a.parse::<f64>(), b.parse::<f64>()) {
        (Ok(x), Ok(y)) => x.total_cmp(&y),
        _ => a.cmp(b),
    });
    values.dedup();
    Ok((key.trim().to_string(), values))
}

fn apply_override(root: &mut toml::Value, dotted: &str, raw: &str) -> Result<()> {
    let missing = || Error::Config {
        key: dotted.into(),
        reason: "sweep path not found in config".into(),
    };
    let segments: Vec<&str> = dotted.split('.').collect();
    let mut cur = root;
    for (i, seg) in segments.iter().enumerate() {
        let last = i + 1 == segments.len();
        if let Ok(idx) = seg.parse::<usize>() {
            let slot = cur.as_array_mut().and_then(|a| a.get_mut(idx)).ok_or_else(missing)?;
            if last {
                *slot = parse_literal(raw);
                return Ok(());
            }
            cur = slot;
        } else {
            let table = cur.as_table_mut().ok_or_else(missing)?;
            if last {
                table.insert(seg.to_string(), parse_literal(raw));
                return Ok(());
            }
            cur = table.get_mut(*seg).ok_or_else(missing)?;
        }
    }
    Err(missing())
}

fn parse_literal(raw: &str) -> toml::Value {
    if !raw.contains(['.', 'e', 'E']) {
        if let Ok(i) = raw.parse::<i64>() {
            return toml::Value::Integer(i);
        }
    }
    if let Ok(f) = raw.parse::<f64>() {
        return toml::Value::Float(f);
    }
    if let Ok(b) = raw.parse::<bool>() {
        return toml::Value::Boolean(b);
    }
    toml::Value::String(raw.to_string())
}

fn run_point(cli: &Cli, text: &str, tag: Option<&str>) -> Result<()> {
    match cli.command {
        Command::Sd => cmd_sd(cli, text, tag),
        Command::SdFit => cmd_sd_fit(cli, text, tag),
        Command::Corr => cmd_corr(cli, text, tag),
        Command::CorrDist => cmd_corr_dist(cli, text, tag),
        Command::Simulate => cmd_simulate(cli, text, tag),
        Command::Nonmarkov => cmd_nonmarkov(cli, text, tag),
        Command::IonParams => cmd_ion_params(cli, text, tag),
        Command::Chain => cmd_chain(cli, text, tag),
        Command::ChainEvolve => cmd_chain_evolve(cli, text, tag),
    }
}

fn out_path(cli: &Cli, file: &str, tag: Option<&str>) -> PathBuf {
    let name = match tag {
        None => file.to_string(),
        Some(t) => {
            let p = Path::new(file);
            let stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or(file);
            match p.extension().and_then(|e| e.to_str()) {
                Some(ext) => format!("{stem}_{t}.{ext}"),
                None => format!("{stem}_{t}"),
            }
        }
    };
    cli.out_dir.join(name)
}

fn header(text: &str) -> ReproHeader {
    ReproHeader::new(text, rayon::current_num_threads())
}

/// `--dry-run`: print the resolved (defaults-filled) parameter table.
fn dry_run_print<T: Serialize>(cfg: &T, tag: Option<&str>) -> Result<()> {
    let table = toml::to_string_pretty(cfg).map_err(|e| Error::Config {
        key: "config".into(),
        reason: e.to_string(),
    })?;
    if let Some(t) = tag {
        println!("# sweep point: {t}");
    }
    print!("{table}");
    println!("# dry run: nothing computed");
    Ok(())
}

fn report_regime(modes: &[lindblad::ModeSpec], strict: bool) -> Result<()> {
    for w in config::enforce_regime(modes, strict)? {
        eprintln!("warning: {w}");
    }
    Ok(())
}

fn cmd_sd(cli: &Cli, text: &str, tag: Option<&str>) -> Result<()> {
    let cfg: SdConfig = config::parse_toml(text)?;
    if cli.dry_run {
        return dry_run_print(&cfg, tag);
    }
    if cfg.components.is_empty() {
        return Err(Error::Config { key: "components".into(), reason: "must not be empty".into() });
    }
    let composite = config::to_composite(&cfg.components)?;
    let omegas = match &cfg.grid {
        Some(g) => g.omegas()?,
        None => {
            let hi = cfg.components.iter().map(|c| c.omega_m_hz).fold(0.0, f64::max);
            config::OmegaGridSection { omega_max_hz: 2.0 * hi, n_points: 2000 }.omegas()?
        }
    };
    let j_eff: Vec<f64> = omegas.iter().map(|&w| spectral::eval_composite(&composite, w)).collect();
    let mut columns = vec![
        ("omega_hz", omegas.iter().map(|&w| angular_to_hz(w)).collect::<Vec<_>>()),
        ("j_eff", j_eff),
    ];
    if let (Some(nbar), [single]) = (cfg.nbar, composite.components.as_slice()) {
        let hbar_beta = correlation::nbar_to_hbar_beta(nbar, single.omega_m())?;
        columns.push((
            "j_reg",
            omegas.iter().map(|&w| spectral::eval_regression_sd(single, hbar_beta, w)).collect(),
        ));
        columns.push((
            "eps_j",
            omegas
                .iter()
                .map(|&w| {
                    spectral::relative_error_epsilon_j(single, hbar_beta, w).unwrap_or(f64::NAN)
                })
                .collect(),
        ));
    }
    output::emit_csv(&header(text), &[], &columns, &out_path(cli, &cfg.output.file, tag))
}

fn cmd_sd_fit(cli: &Cli, text: &str, tag: Option<&str>) -> Result<()> {
    let cfg: SdFitConfig = config::parse_toml(text)?;
    if cli.dry_run {
        return dry_run_print(&cfg, tag);
    }
    let target = cfg.target.to_target()?;
    let grid = match &cfg.grid {
        Some(g) => g.omegas()?,
        None => spectral::default_fit_grid(cfg.target.omega_hi(&target)),
    };
    let fit = spectral::fit_spectral_density(&target, cfg.n_components, &grid, None, cfg.seed)?;
    let comps = &fit.composite.components;
    let columns = [
        ("component", (0..comps.len()).map(|i| i as f64).collect::<Vec<_>>()),
        ("omega_m_hz", comps.iter().map(|c| angular_to_hz(c.omega_m())).collect()),
        ("kappa_hz", comps.iter().map(|c| angular_to_hz(c.kappa())).collect()),
        ("lambda_hz", comps.iter().map(|c| angular_to_hz(c.lambda())).collect()),
    ];
    let comments = vec![
        format!("residual: {}", format_float(fit.residual)),
        format!("seed: {}", cfg.seed),
    ];
    output::emit_csv(&header(text), &comments, &columns, &out_path(cli, &cfg.output.file, tag))
}

fn cmd_corr(cli: &Cli, text: &str, tag: Option<&str>) -> Result<()> {
    let cfg: CorrConfig = config::parse_toml(text)?;
    if cli.dry_run {
        return dry_run_print(&cfg, tag);
    }
    let p = cfg.bath.to_params()?;
    report_regime(
        &[lindblad::ModeSpec {
            omega_m: p.omega_m,
            lambda: p.lambda,
            kappa: p.kappa,
            nbar: correlation::hbar_beta_to_nbar(p.hbar_beta, p.omega_m)?,
            n_max: 1,
        }],
        cli.strict_regime,
    )?;
    let times = cfg.grid.times()?;
    let mut cols: [Vec<f64>; 4] = Default::default();
    for &t in &times {
        let exact = correlation::l_ohmic(&p, t);
        let reg = correlation::l_lindblad(&p, t);
        cols[0].push(exact.real);
        cols[1].push(exact.imag);
        cols[2].push(reg.real);
        cols[3].push(reg.imag);
    }
    let [a, b, c, d] = cols;
    let columns = [
        ("t", times),
        ("l_re", a),
        ("l_im", b),
        ("l_lindblad_re", c),
        ("l_lindblad_im", d),
    ];
    output::emit_csv(&header(text), &[], &columns, &out_path(cli, &cfg.output.file, tag))
}

fn cmd_corr_dist(cli: &Cli, text: &str, tag: Option<&str>) -> Result<()> {
    let cfg: CorrDistConfig = config::parse_toml(text)?;
    if cli.dry_run {
        return dry_run_print(&cfg, tag);
    }
    if cfg.kappa_hz.is_empty() || cfg.nbar.is_empty() {
        return Err(Error::Config {
            key: "kappa_hz/nbar".into(),
            reason: "both lists must be non-empty".into(),
        });
    }
    let omega_m = hz_to_angular(cfg.bath.omega_m_hz);
    let lambda = hz_to_angular(cfg.bath.lambda_hz);
    let mut rows: [Vec<f64>; 3] = Default::default();
    for &kappa_hz in &cfg.kappa_hz {
        for &nbar in &cfg.nbar {
            let hbar_beta = correlation::nbar_to_hbar_beta(nbar, omega_m)?;
            let p = BathParams::new(
                omega_m,
                hz_to_angular(kappa_hz),
                hbar_beta,
                lambda,
                cfg.bath.n_matsubara,
            )?;
            rows[0].push(kappa_hz);
            rows[1].push(nbar);
            rows[2].push(correlation::distance_d(&p));
        }
    }
    let [k, n, d] = rows;
    let columns = [("kappa_hz", k), ("nbar", n), ("d", d)];
    output::emit_csv(&header(text), &[], &columns, &out_path(cli, &cfg.output.file, tag))
}

fn cmd_simulate(cli: &Cli, text: &str, tag: Option<&str>) -> Result<()> {
    let cfg: SimulateConfig = config::parse_toml(text)?;
    if cli.dry_run {
        return dry_run_print(&cfg, tag);
    }
    let spec = cfg.to_spec()?;
    report_regime(&spec.modes, cli.strict_regime)?;
    let thermal: Vec<_> =
        spec.modes.iter().map(|m| thermal_state(m.nbar, m.n_max).mat).collect();
    let refs: Vec<&_> = thermal.iter().collect();
    let rho0 = lindblad::product_state(&cfg.initial.spin_matrix()?, &refs)?;
    let traj = lindblad::sigma_z_trajectory(&spec, &rho0, &cfg.grid.times()?)?;
    let columns = [
        ("t", traj.iter().map(|&(t, _)| t).collect::<Vec<_>>()),
        ("sigma_z", traj.iter().map(|&(_, s)| s).collect()),
    ];
    output::emit_csv(&header(text), &[], &columns, &out_path(cli, &cfg.output.file, tag))
}

fn cmd_nonmarkov(cli: &Cli, text: &str, tag: Option<&str>) -> Result<()> {
    let cfg: NonmarkovConfig = config::parse_toml(text)?;
    if cli.dry_run {
        return dry_run_print(&cfg, tag);
    }
    let spec = cfg.to_spec()?;
    report_regime(&spec.modes, cli.strict_regime)?;
    let times = cfg.grid.times()?;
    let series = nonmarkov::reconstruct_maps(&spec, &times)?;
    let rhp = nonmarkov::n_rhp(&series, G_FLOOR)?;
    let blp = nonmarkov::n_blp_lower_bound_from_maps(&series, &SpinPair::ALL);
    // g lives on intervals; pad the final sample so columns stay rectangular
    let mut g: Vec<f64> = rhp.g.iter().map(|&(_, gi)| gi).collect();
    g.push(0.0);
    let mut columns = vec![("t", times), ("g", g)];
    let names = ["d_z", "d_x", "d_y"];
    for (pair, name) in blp.pairs.iter().zip(names) {
        columns.push((name, pair.d.iter().map(|&(_, d)| d).collect()));
    }
    let mut comments = vec![
        format!("n_rhp: {}", format_float(rhp.n_rhp)),
        format!("n_blp: {}", format_float(blp.n_blp)),
    ];
    for p in &blp.pairs {
        comments.push(format!("n_blp[{}]: {}", p.pair.label(), format_float(p.measure)));
    }
    output::emit_csv(&header(text), &comments, &columns, &out_path(cli, &cfg.output.file, tag))
}

fn cmd_ion_params(cli: &Cli, text: &str, tag: Option<&str>) -> Result<()> {
    let cfg: IonParamsConfig = config::parse_toml(text)?;
    if cli.dry_run {
        return dry_run_print(&cfg, tag);
    }
    let crystal = TwoIonCrystal {
        mass_1: cfg.crystal.mass_1_amu,
        mass_2: cfg.crystal.mass_2_amu,
        omega_com_ref: hz_to_angular(cfg.crystal.omega_com_ref_hz),
        mass_ref: cfg.crystal.mass_ref_amu.unwrap_or(cfg.crystal.mass_1_amu),
    };
    let lasers = RamanLasers {
        wavelength: cfg.lasers.wavelength_nm * 1e-9,
        geometry_angle: cfg.lasers.geometry_angle_deg.to_radians(),
        omega_odf: hz_to_angular(cfg.lasers.omega_odf_hz),
        detuning_delta_m: hz_to_angular(cfg.lasers.detuning_delta_m_hz),
        big_detuning: hz_to_angular(cfg.lasers.big_detuning_hz),
        gamma: hz_to_angular(cfg.lasers.gamma_hz),
        rabi_0: hz_to_angular(cfg.lasers.rabi_0_hz),
    };
    lasers.validate()?;
    let modes = iontrap::axial_normal_modes(&crystal)?;
    if cfg.ion_index > 1 {
        return Err(Error::Config { key: "ion_index".into(), reason: "must be 0 or 1".into() });
    }
    let mass = [crystal.mass_1, crystal.mass_2][cfg.ion_index];
    let eta = iontrap::lamb_dicke(&modes, &lasers, cfg.ion_index, mass)?;
    let lambda = iontrap::spin_motion_coupling(eta[1], lasers.omega_odf);

    // antisymmetric illumination: one beam flips sign on the down state,
    // giving a pure ODF beat note
    let o = c64::new(lasers.rabi_0, 0.0);
    let rabi = RabiTable { up: [o, o], down: [o, -o] };
    let det = iontrap::DetuningTable::scalar(lasers.big_detuning);
    let eff = iontrap::effective_rabi_frequencies(&rabi, &det, lasers.gamma)?;
    let scatter = iontrap::scattering_rates(
        &rabi,
        lasers.big_detuning,
        0.5 * lasers.gamma,
        0.5 * lasers.gamma,
        lasers.rabi_0,
    )?;

    let f = |x: f64| format_float(x);
    let hz = |x: f64| format_float(angular_to_hz(x));
    let mut rows = vec![
        ("omega_1_hz".to_string(), hz(modes.omega_1)),
        ("omega_2_hz".to_string(), hz(modes.omega_2)),
        ("eta_1".to_string(), f(eta[0])),
        ("eta_2".to_string(), f(eta[1])),
        ("k_eff_per_m".to_string(), f(lasers.k_eff())),
        ("lambda_hz".to_string(), hz(lambda)),
        ("omega_odf_eff_hz".to_string(), hz(eff.omega_odf.norm())),
        ("omega_rw_eff_hz".to_string(), hz(eff.omega_rw.norm())),
        ("stark_up_hz".to_string(), hz(eff.delta_eps_up)),
        ("stark_down_hz".to_string(), hz(eff.delta_eps_down)),
        ("scatter_rayleigh_up_hz".to_string(), hz(scatter.l_up_up)),
        ("scatter_rayleigh_down_hz".to_string(), hz(scatter.l_down_down)),
        ("scatter_raman_up_down_hz".to_string(), hz(scatter.l_up_down)),
        ("scatter_raman_down_up_hz".to_string(), hz(scatter.l_down_up)),
        ("gamma_eff_hz".to_string(), hz(scatter.gamma_eff)),
        ("detuning_marginal".to_string(), lasers.detuning_warning().to_string()),
    ];
    for j in 0..2 {
        for n in 0..2 {
            rows.push((format!("m_tilde_{}{}", j + 1, n + 1), f(modes.m_tilde[j][n])));
        }
    }
    if let Some(mode) = &cfg.mode {
        let report = iontrap::regime_check(&RegimeInput {
            omega_m: lasers.detuning_delta_m,
            kappa: hz_to_angular(mode.kappa_hz),
            nbar: mode.nbar,
            omega_1: modes.omega_1,
            omega_l: modes.omega_2 - lasers.detuning_delta_m,
            eta_1: eta[0],
            omega_odf: lasers.omega_odf,
        });
        for r in &report.ratios {
            rows.push((format!("regime[{}]", r.name), f(r.value)));
            rows.push((format!("regime_status[{}]", r.name), r.status.label().to_string()));
        }
        let worst = report.worst();
        rows.push(("regime_worst".to_string(), worst.label().to_string()));
        if cli.strict_regime && worst != RegimeStatus::Pass {
            let named = report
                .ratios
                .iter()
                .filter(|r| r.status != RegimeStatus::Pass)
                .map(|r| r.name)
                .collect::<Vec<_>>()
                .join(", ");
            return Err(Error::RegimeViolation(named));
        }
    }
    output::emit_table(&header(text), &[], &rows, &out_path(cli, &cfg.output.file, tag))
}

fn chain_from_target(
    target: &TargetSpectralDensity,
    omega_max_hz: f64,
    n_nodes: usize,
    n_chain: usize,
) -> Result<(chainmap::DiscretizedMeasure, chainmap::ChainCoefficients)> {
    let measure = chainmap::discretize_measure(target, hz_to_angular(omega_max_hz), n_nodes)?;
    let coeffs = chainmap::chain_coefficients(&measure, n_chain)?;
    Ok((measure, coeffs))
}

fn cmd_chain(cli: &Cli, text: &str, tag: Option<&str>) -> Result<()> {
    let cfg: ChainConfig = config::parse_toml(text)?;
    if cli.dry_run {
        return dry_run_print(&cfg, tag);
    }
    let target = cfg.target.to_target()?;
    let (measure, coeffs) =
        chain_from_target(&target, cfg.omega_max_hz, cfg.n_nodes, cfg.n_chain)?;
    let n = coeffs.n_chain();
    // t_next_hz couples site n to n+1; the last site has no successor
    let mut t_next: Vec<f64> = coeffs.hoppings.iter().map(|&t| angular_to_hz(t)).collect();
    t_next.push(0.0);
    let columns = [
        ("site", (0..n).map(|i| i as f64).collect::<Vec<_>>()),
        ("omega_n_hz", coeffs.omega.iter().map(|&w| angular_to_hz(w)).collect()),
        ("t_next_hz", t_next),
    ];
    let comments = vec![
        format!("t0_hz: {}", format_float(angular_to_hz(coeffs.t0))),
        format!("n_nodes: {}", measure.nodes.len()),
    ];
    output::emit_csv(&header(text), &comments, &columns, &out_path(cli, &cfg.output.file, tag))
}

fn cmd_chain_evolve(cli: &Cli, text: &str, tag: Option<&str>) -> Result<()> {
    let cfg: ChainEvolveConfig = config::parse_toml(text)?;
    if cli.dry_run {
        return dry_run_print(&cfg, tag);
    }
    let target = cfg.target.to_target()?;
    let (_, coeffs) = chain_from_target(&target, cfg.omega_max_hz, cfg.n_nodes, cfg.n_sites)?;
    let times = cfg.grid.times()?;
    // the oracle propagates from t = 0; drop a leading zero sample and
    // reinstate it afterwards
    let start = usize::from(times[0] == 0.0);
    let traj = chainmap::exact_chain_evolution(
        &cfg.spin.to_params(),
        &coeffs,
        cfg.d_max,
        cfg.n_sites,
        cfg.initial.spin_vector()?,
        &times[start..],
    )?;
    let mut t_col = Vec::with_capacity(times.len());
    let mut sz_col = Vec::with_capacity(times.len());
    if start == 1 {
        let v = cfg.initial.spin_vector()?;
        t_col.push(0.0);
        sz_col.push(v[0].norm_sqr() - v[1].norm_sqr());
    }
    for (t, sz) in traj {
        t_col.push(t);
        sz_col.push(sz);
    }
    let columns = [("t", t_col), ("sigma_z", sz_col)];
    output::emit_csv(&header(text), &[], &columns, &out_path(cli, &cfg.output.file, tag))
}

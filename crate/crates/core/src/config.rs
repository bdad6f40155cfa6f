//! Run configuration: one TOML file per run, frequencies in Hz, converted
//! to rad/s on load. Unknown keys are rejected.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::correlation::{nbar_to_hbar_beta, BathParams};
use crate::error::{Error, Result};
use crate::iontrap::RegimeStatus;
use crate::linalg::{CMat, ONE, ZERO};
use crate::lindblad::{ModeSpec, SpinParams, SystemSpec};
use crate::spectral::{CompositeSpectralDensity, LorentzianComponent, TargetSpectralDensity};
use crate::units::hz_to_angular;
use faer::c64;

pub fn parse_toml<T: DeserializeOwned>(text: &str) -> Result<T> {
    toml::from_str(text).map_err(|e| Error::Config {
        key: "config".into(),
        reason: e.message().to_string(),
    })
}

fn cfg_err(key: &str, reason: impl Into<String>) -> Error {
    Error::Config { key: key.into(), reason: reason.into() }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinSection {
    /// bias ε/h (Hz)
    #[serde(default)]
    pub epsilon_hz: f64,
    /// tunneling Δ/2π (Hz); the σx drive is Ω_d = −Δ
    pub delta_hz: f64,
}

impl SpinSection {
    pub fn to_params(&self) -> SpinParams {
        SpinParams {
            epsilon_over_hbar: hz_to_angular(self.epsilon_hz),
            delta_rabi: hz_to_angular(self.delta_hz),
        }
    }
}

fn default_n_max() -> usize {
    15
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSection {
    pub omega_m_hz: f64,
    pub lambda_hz: f64,
    #[serde(default)]
    pub kappa_hz: f64,
    #[serde(default)]
    pub nbar: f64,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
}

impl ModeSection {
    pub fn to_spec(&self) -> ModeSpec {
        ModeSpec {
            omega_m: hz_to_angular(self.omega_m_hz),
            lambda: hz_to_angular(self.lambda_hz),
            kappa: hz_to_angular(self.kappa_hz),
            nbar: self.nbar,
            n_max: self.n_max,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGridSection {
    /// final time (s); the grid is n_points samples on [0, t_max]
    pub t_max: f64,
    pub n_points: usize,
}

impl TimeGridSection {
    pub fn times(&self) -> Result<Vec<f64>> {
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(cfg_err("grid.t_max", format!("{} must be > 0", self.t_max)));
        }
        if self.n_points < 2 {
            return Err(cfg_err("grid.n_points", "must be >= 2"));
        }
        let n = self.n_points;
        Ok((0..n).map(|i| self.t_max * i as f64 / (n - 1) as f64).collect())
    }
}

fn default_omega_points() -> usize {
    2000
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmegaGridSection {
    pub omega_max_hz: f64,
    #[serde(default = "default_omega_points")]
    pub n_points: usize,
}

impl OmegaGridSection {
    /// rad/s samples on [0, omega_max]
    pub fn omegas(&self) -> Result<Vec<f64>> {
        if !(self.omega_max_hz > 0.0) {
            return Err(cfg_err("grid.omega_max_hz", "must be > 0"));
        }
        if self.n_points < 2 {
            return Err(cfg_err("grid.n_points", "must be >= 2"));
        }
        let hi = hz_to_angular(self.omega_max_hz);
        let n = self.n_points;
        Ok((0..n).map(|i| hi * i as f64 / (n - 1) as f64).collect())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentSection {
    pub lambda_hz: f64,
    pub kappa_hz: f64,
    pub omega_m_hz: f64,
}

impl ComponentSection {
    pub fn to_component(&self) -> Result<LorentzianComponent> {
        LorentzianComponent::new(
            hz_to_angular(self.lambda_hz),
            hz_to_angular(self.kappa_hz),
            hz_to_angular(self.omega_m_hz),
        )
    }
}

pub fn to_composite(components: &[ComponentSection]) -> Result<CompositeSpectralDensity> {
    Ok(CompositeSpectralDensity::new(
        components.iter().map(|c| c.to_component()).collect::<Result<_>>()?,
    ))
}

/// Target spectral density: inline Lorentzian components, or a two-column
/// CSV (omega_hz, j_hz) referenced by path.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSection {
    #[serde(default)]
    pub components: Vec<ComponentSection>,
    pub file: Option<String>,
}

impl TargetSection {
    pub fn to_target(&self) -> Result<TargetSpectralDensity> {
        match (&self.file, self.components.is_empty()) {
            (Some(_), false) | (None, true) => Err(cfg_err(
                "target",
                "provide exactly one of `components` or `file`",
            )),
            (None, false) => Ok(TargetSpectralDensity::Composite(to_composite(&self.components)?)),
            (Some(path), true) => {
                let text = std::fs::read_to_string(path)?;
                let mut omega = Vec::new();
                let mut j = Vec::new();
                for line in text.lines() {
                    let line = line.trim();
                    if line.is_empty() || line.starts_with('#') {
                        continue;
                    }
                    let cols: Vec<&str> = line.split(',').map(str::trim).collect();
                    if cols == ["omega_hz", "j_hz"] {
                        continue;
                    }
                    if cols.len() != 2 {
                        return Err(cfg_err("target.file", format!("bad row `{line}`")));
                    }
                    let parse = |s: &str| {
                        s.parse::<f64>()
                            .map_err(|_| cfg_err("target.file", format!("bad number `{s}`")))
                    };
                    omega.push(hz_to_angular(parse(cols[0])?));
                    j.push(hz_to_angular(parse(cols[1])?));
                }
                TargetSpectralDensity::tabulated(omega, j)
            }
        }
    }

    /// highest resonance / tabulation frequency, for default grids
    pub fn omega_hi(&self, target: &TargetSpectralDensity) -> f64 {
        match target {
            TargetSpectralDensity::Composite(c) => c
                .components
                .iter()
                .map(|k| k.omega_m())
                .fold(0.0, f64::max),
            TargetSpectralDensity::Tabulated { omega, .. } => {
                omega.last().copied().unwrap_or(0.0) / 2.0
            }
        }
    }
}

fn default_spin_state() -> String {
    "up".into()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    /// one of up, down, plus, minus, plus_i, minus_i
    #[serde(default = "default_spin_state")]
    pub spin: String,
}

impl Default for InitialSection {
    fn default() -> Self {
        Self { spin: default_spin_state() }
    }
}

impl InitialSection {
    pub fn spin_vector(&self) -> Result<[c64; 2]> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h = c64::new(s, 0.0);
        Ok(match self.spin.as_str() {
            "up" => [ONE, ZERO],
            "down" => [ZERO, ONE],
            "plus" => [h, h],
            "minus" => [h, -h],
            "plus_i" => [h, c64::new(0.0, s)],
            "minus_i" => [h, c64::new(0.0, -s)],
            other => {
                return Err(cfg_err(
                    "initial.spin",
                    format!("unknown state `{other}` (up/down/plus/minus/plus_i/minus_i)"),
                ))
            }
        })
    }

    pub fn spin_matrix(&self) -> Result<CMat> {
        let v = self.spin_vector()?;
        Ok(CMat::from_fn(2, 2, |i, j| v[i] * v[j].conj()))
    }
}

fn out_file(name: &'static str) -> impl Fn() -> OutputSection {
    move || OutputSection { file: name.into() }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub file: String,
}

macro_rules! default_output {
    ($fn_name:ident, $file:literal) => {
        fn $fn_name() -> OutputSection {
            out_file($file)()
        }
    };
}
default_output!(out_sd, "sd.csv");
default_output!(out_fit, "fit.csv");
default_output!(out_corr, "corr.csv");
default_output!(out_dist, "dist.csv");
default_output!(out_sigma_z, "sigma_z.csv");
default_output!(out_nonmarkov, "nonmarkov.csv");
default_output!(out_ion, "ion_params.csv");
default_output!(out_chain, "chain.csv");
default_output!(out_chain_sz, "chain_sigma_z.csv");

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SdConfig {
    pub components: Vec<ComponentSection>,
    /// with a single component and nbar set, also tabulate the
    /// regression-theorem density and its relative error
    pub nbar: Option<f64>,
    pub grid: Option<OmegaGridSection>,
    #[serde(default = "out_sd")]
    pub output: OutputSection,
}

fn default_seed() -> u64 {
    7
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SdFitConfig {
    pub target: TargetSection,
    pub n_components: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub grid: Option<OmegaGridSection>,
    #[serde(default = "out_fit")]
    pub output: OutputSection,
}

fn default_n_matsubara() -> usize {
    1000
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathSection {
    pub omega_m_hz: f64,
    pub kappa_hz: f64,
    pub lambda_hz: f64,
    pub nbar: f64,
    #[serde(default = "default_n_matsubara")]
    pub n_matsubara: usize,
}

impl BathSection {
    pub fn to_params(&self) -> Result<BathParams> {
        let omega_m = hz_to_angular(self.omega_m_hz);
        let hbar_beta = nbar_to_hbar_beta(self.nbar, omega_m)?;
        BathParams::new(
            omega_m,
            hz_to_angular(self.kappa_hz),
            hbar_beta,
            hz_to_angular(self.lambda_hz),
            self.n_matsubara,
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrConfig {
    pub bath: BathSection,
    pub grid: TimeGridSection,
    #[serde(default = "out_corr")]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistBathSection {
    pub omega_m_hz: f64,
    pub lambda_hz: f64,
    #[serde(default = "default_n_matsubara")]
    pub n_matsubara: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrDistConfig {
    pub bath: DistBathSection,
    pub kappa_hz: Vec<f64>,
    pub nbar: Vec<f64>,
    #[serde(default = "out_dist")]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub spin: SpinSection,
    pub modes: Vec<ModeSection>,
    #[serde(default)]
    pub initial: InitialSection,
    pub grid: TimeGridSection,
    pub dim_cap: Option<usize>,
    #[serde(default = "out_sigma_z")]
    pub output: OutputSection,
}

impl SimulateConfig {
    pub fn to_spec(&self) -> Result<SystemSpec> {
        build_spec(&self.spin, &self.modes, self.dim_cap)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonmarkovConfig {
    pub spin: SpinSection,
    pub modes: Vec<ModeSection>,
    pub grid: TimeGridSection,
    pub dim_cap: Option<usize>,
    #[serde(default = "out_nonmarkov")]
    pub output: OutputSection,
}

impl NonmarkovConfig {
    pub fn to_spec(&self) -> Result<SystemSpec> {
        build_spec(&self.spin, &self.modes, self.dim_cap)
    }
}

fn build_spec(
    spin: &SpinSection,
    modes: &[ModeSection],
    dim_cap: Option<usize>,
) -> Result<SystemSpec> {
    if modes.is_empty() {
        return Err(cfg_err("modes", "at least one mode is required"));
    }
    let mut spec =
        SystemSpec::new(spin.to_params(), modes.iter().map(ModeSection::to_spec).collect());
    if let Some(cap) = dim_cap {
        spec.dim_cap = cap;
    }
    spec.validate()?;
    Ok(spec)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrystalSection {
    pub mass_1_amu: f64,
    pub mass_2_amu: f64,
    pub omega_com_ref_hz: f64,
    pub mass_ref_amu: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaserSection {
    pub wavelength_nm: f64,
    pub geometry_angle_deg: f64,
    pub omega_odf_hz: f64,
    /// beatnote detuning δ_m from the driven mode (Hz)
    pub detuning_delta_m_hz: f64,
    pub big_detuning_hz: f64,
    pub gamma_hz: f64,
    pub rabi_0_hz: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EngineeredModeSection {
    pub kappa_hz: f64,
    pub nbar: f64,
}

fn default_ion_index() -> usize {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IonParamsConfig {
    pub crystal: CrystalSection,
    pub lasers: LaserSection,
    /// which ion the beams address (0 = coolant, 1 = spin)
    #[serde(default = "default_ion_index")]
    pub ion_index: usize,
    /// engineered-reservoir numbers for the regime report
    pub mode: Option<EngineeredModeSection>,
    #[serde(default = "out_ion")]
    pub output: OutputSection,
}

fn default_chain_omega_max_hz() -> f64 {
    200e3
}

fn default_chain_nodes() -> usize {
    2000
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainConfig {
    pub target: TargetSection,
    #[serde(default = "default_chain_omega_max_hz")]
    pub omega_max_hz: f64,
    #[serde(default = "default_chain_nodes")]
    pub n_nodes: usize,
    pub n_chain: usize,
    #[serde(default = "out_chain")]
    pub output: OutputSection,
}

fn default_d_max() -> usize {
    4
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainEvolveConfig {
    pub spin: SpinSection,
    pub target: TargetSection,
    #[serde(default = "default_chain_omega_max_hz")]
    pub omega_max_hz: f64,
    #[serde(default = "default_chain_nodes")]
    pub n_nodes: usize,
    #[serde(default = "default_d_max")]
    pub d_max: usize,
    pub n_sites: usize,
    #[serde(default)]
    pub initial: InitialSection,
    pub grid: TimeGridSection,
    #[serde(default = "out_chain_sz")]
    pub output: OutputSection,
}

/// Small-parameter gate on the engineered modes: κ/ω_m, ħβκ, and κ/ν₁ must
/// all be small for the Lorentzian-bath equivalence to hold. In strict mode
/// any warn-level ratio rejects the run; otherwise warnings are returned
/// for the caller to print.
pub fn enforce_regime(modes: &[ModeSpec], strict: bool) -> Result<Vec<String>> {
    let mut warnings = Vec::new();
    for (i, m) in modes.iter().enumerate() {
        if m.kappa == 0.0 {
            continue;
        }
        let hbk = if m.nbar > 0.0 {
            (1.0 + 1.0 / m.nbar).ln() * m.kappa / m.omega_m
        } else {
            f64::INFINITY
        };
        let ratios = [
            ("kappa/omega_m", m.kappa / m.omega_m),
            ("hbar_beta*kappa", hbk),
            ("kappa/nu_1", hbk / std::f64::consts::TAU),
        ];
        for (name, value) in ratios {
            let status = RegimeStatus::of(value);
            if status == RegimeStatus::Pass {
                continue;
            }
            let msg = format!("mode {i}: {name} = {value:.3e} ({})", status.label());
            if strict {
                return Err(Error::RegimeViolation(msg));
            }
            warnings.push(msg);
        }
    }
    Ok(warnings)
}

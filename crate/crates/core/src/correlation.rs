//! Reservoir correlation functions of the damped oscillator.
//!
//! Two descriptions of the same damped mode are compared in the time domain:
//! the exact coordinate correlations of an oscillator coupled to an Ohmic
//! macroscopic bath (closed forms with a Matsubara sum) and the quantum
//! regression result for the Lindblad-damped oscillator. Their imaginary
//! parts agree identically; the real parts agree in the regime
//! κ ≪ ω_m, ν₁ which is what makes the damped mode usable as an engineered
//! reservoir.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::quad::{integrate, QuadConfig};
use crate::spectral::TargetSpectralDensity;
use crate::units::coth;

/// Parameters of one damped reservoir mode plus the thermal state.
///
/// `hbar_beta` is the product ħβ in seconds; Matsubara frequencies are
/// ν_n = 2πn/(ħβ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathParams {
    pub omega_m: f64,
    pub kappa: f64,
    pub hbar_beta: f64,
    pub lambda: f64,
    pub n_matsubara: usize,
}

impl BathParams {
    pub fn new(
        omega_m: f64,
        kappa: f64,
        hbar_beta: f64,
        lambda: f64,
        n_matsubara: usize,
    ) -> Result<Self> {
        if !(omega_m > 0.0 && omega_m.is_finite()) {
            return Err(Error::InvalidParameter(format!("omega_m = {omega_m} must be > 0")));
        }
        if !(kappa > 0.0 && kappa < omega_m) {
            return Err(Error::InvalidParameter(format!(
                "kappa = {kappa} must satisfy 0 < kappa < omega_m = {omega_m}"
            )));
        }
        if !(hbar_beta > 0.0 && hbar_beta.is_finite()) {
            return Err(Error::InvalidParameter(format!("hbar_beta = {hbar_beta} must be > 0")));
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!("lambda = {lambda} must be >= 0")));
        }
        if n_matsubara == 0 {
            return Err(Error::InvalidParameter("n_matsubara must be >= 1".into()));
        }
        Ok(Self { omega_m, kappa, hbar_beta, lambda, n_matsubara })
    }

    /// Free oscillation frequency Ω = √(ω_m² + κ²).
    pub fn free_frequency(&self) -> f64 {
        self.omega_m.hypot(self.kappa)
    }

    /// First Matsubara frequency ν₁ = 2π/(ħβ).
    pub fn nu1(&self) -> f64 {
        TAU / self.hbar_beta
    }

    /// Regime diagnostic κħβ/(2π) = κ/ν₁.
    pub fn kappa_over_nu1(&self) -> f64 {
        self.kappa * self.hbar_beta / TAU
    }
}

/// L(t) = L′(t) + i L″(t), units 1/s².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexCorrelation {
    pub real: f64,
    pub imag: f64,
}

/// ħβ from the mean thermal occupation n̄ at frequency ω: ln(1 + 1/n̄)/ω.
pub fn nbar_to_hbar_beta(nbar: f64, omega: f64) -> Result<f64> {
    if !(nbar > 0.0 && nbar.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "nbar = {nbar} must be > 0 (nbar = 0 means infinite beta)"
        )));
    }
    if !(omega > 0.0) {
        return Err(Error::InvalidParameter(format!("omega = {omega} must be > 0")));
    }
    Ok((1.0 + 1.0 / nbar).ln() / omega)
}

/// Inverse of [`nbar_to_hbar_beta`]: n̄ = 1/(e^{ħβω} − 1).
pub fn hbar_beta_to_nbar(hbar_beta: f64, omega: f64) -> Result<f64> {
    if !(hbar_beta > 0.0 && omega > 0.0) {
        return Err(Error::InvalidParameter(
            "hbar_beta and omega must both be > 0".into(),
        ));
    }
    Ok(1.0 / (hbar_beta * omega).exp_m1())
}

/// Correlation function of the oscillator damped by an Ohmic macroscopic
/// bath: real part L₁ + L₂ (Matsubara sum truncated at `n_matsubara`),
/// imaginary part −λ² sin(ω_m t) e^{−κ|t|}.
pub fn l_ohmic(p: &BathParams, t: f64) -> ComplexCorrelation {
    let l2 = p.lambda * p.lambda;
    let at = t.abs();
    let decay = (-p.kappa * at).exp();
    let bw = p.hbar_beta * p.omega_m;
    let bk = p.hbar_beta * p.kappa;
    let den = bw.cosh() - bk.cos();
    let l1 = l2 * (bw.sinh() / den * (p.omega_m * t).cos()
        + bk.sin() / den * (p.omega_m * at).sin())
        * decay;
    let real = l1 + matsubara_l2(p, at);
    ComplexCorrelation {
        real,
        imag: -l2 * (p.omega_m * t).sin() * decay,
    }
}

/// The Matsubara correction L₂(t) ≤ 0, truncated at `p.n_matsubara` terms.
pub fn matsubara_l2(p: &BathParams, t: f64) -> f64 {
    let at = t.abs();
    let omega2 = p.omega_m * p.omega_m + p.kappa * p.kappa;
    let k2 = p.kappa * p.kappa;
    let mut sum = 0.0;
    for n in 1..=p.n_matsubara {
        let nu = TAU * n as f64 / p.hbar_beta;
        let nu2 = nu * nu;
        let term = nu * (-nu * at).exp() / ((omega2 + nu2).powi(2) - 4.0 * k2 * nu2);
        sum += term;
        // exp tail underflows quickly for t > 0
        if term == 0.0 && n > 1 {
            break;
        }
    }
    -p.lambda * p.lambda * 8.0 * p.kappa * p.omega_m / p.hbar_beta * sum
}

/// Regression-theorem correlation function of the Lindblad-damped mode:
/// L′_L = λ² coth(βħω_m/2) cos(ω_m t) e^{−κ|t|}, same imaginary part as
/// [`l_ohmic`].
pub fn l_lindblad(p: &BathParams, t: f64) -> ComplexCorrelation {
    let l2 = p.lambda * p.lambda;
    let at = t.abs();
    let decay = (-p.kappa * at).exp();
    ComplexCorrelation {
        real: l2 * coth(p.hbar_beta * p.omega_m / 2.0) * (p.omega_m * t).cos() * decay,
        imag: -l2 * (p.omega_m * t).sin() * decay,
    }
}

/// Frequency cutoff used when integrating a spectral density.
///
/// The composite J decays only like 1/ω³ past the resonances, so the cutoff
/// must sit many resonance frequencies out (not merely many linewidths) to
/// keep the truncated tail below ~1e-5 of the correlation function.
pub fn quadrature_cutoff(j: &TargetSpectralDensity) -> f64 {
    match j {
        TargetSpectralDensity::Composite(c) => c
            .components
            .iter()
            .map(|k| (k.omega_m() + 50.0 * k.kappa()).max(30.0 * k.omega_m()))
            .fold(0.0, f64::max),
        TargetSpectralDensity::Tabulated { omega, .. } => *omega.last().unwrap(),
    }
}

/// L(t) = (1/π) ∫₀^ωcut J(ω)[coth(βħω/2) cos(ωt) − i sin(ωt)] dω by adaptive
/// quadrature.
///
/// The ω → 0 singularity of coth is removable for J ∝ ω; quadrature nodes
/// are interior so the product is evaluated directly (finite everywhere on
/// the open interval).
pub fn l_from_spectral_density(
    j: &TargetSpectralDensity,
    hbar_beta: f64,
    t: f64,
    cfg: &QuadConfig,
) -> Result<ComplexCorrelation> {
    let cut = quadrature_cutoff(j);
    if cut == 0.0 {
        return Ok(ComplexCorrelation { real: 0.0, imag: 0.0 });
    }
    let real = integrate(
        |w| j.eval(w) * coth(hbar_beta * w / 2.0) * (w * t).cos(),
        0.0,
        cut,
        cfg,
    )? / PI;
    let imag = -integrate(|w| j.eval(w) * (w * t).sin(), 0.0, cut, cfg)? / PI;
    Ok(ComplexCorrelation { real, imag })
}

/// Integrated distance between the Ohmic and Lindblad correlation functions,
/// evaluated in closed form (Matsubara sum truncated at `n_matsubara`).
pub fn distance_d(p: &BathParams) -> f64 {
    let bw = p.hbar_beta * p.omega_m;
    let bk = p.hbar_beta * p.kappa;
    let den = bw.cosh() - bk.cos();
    let c_q = bw.sinh() / den - coth(bw / 2.0);
    let c_cl = bk.sin() / den;
    let w2k2 = p.kappa * p.kappa + p.omega_m * p.omega_m;
    let mut sum = 0.0;
    for n in 1..=p.n_matsubara {
        let nu = TAU * n as f64 / p.hbar_beta;
        let nu2 = nu * nu;
        sum += 1.0 / ((w2k2 + nu2).powi(2) - 4.0 * p.kappa * p.kappa * nu2);
    }
    (c_q * p.kappa / w2k2 + c_cl * p.omega_m / w2k2
        - 8.0 * p.kappa * p.omega_m / p.hbar_beta * sum)
        .abs()
}

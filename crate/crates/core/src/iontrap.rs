//! Trapped-ion hardware knobs ↔ abstract model parameters.
//!
//! A two-ion crystal in a common axial harmonic well provides the damped
//! mode (coolant ion 1) and the spin (ion 2). This module computes the
//! axial normal modes, Lamb-Dicke factors, the spin-motion coupling
//! λ = η Ω_odf, the adiabatic-elimination effective Rabi frequencies and
//! scattering rates of the Raman beams, and the regime diagnostics that
//! decide whether the engineered-reservoir picture applies.

use faer::c64;

use crate::error::{Error, Result};
use crate::units::{AMU, HBAR};

/// Two ions of possibly different mass in one axial well. The well is
/// calibrated by the center-of-mass frequency a lone ion of `mass_ref`
/// would have.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoIonCrystal {
    /// coolant ion mass (amu)
    pub mass_1: f64,
    /// spin ion mass (amu)
    pub mass_2: f64,
    /// single-ion reference center-of-mass frequency (rad/s)
    pub omega_com_ref: f64,
    /// reference ion mass (amu)
    pub mass_ref: f64,
}

impl TwoIonCrystal {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("mass_1", self.mass_1),
            ("mass_2", self.mass_2),
            ("omega_com_ref", self.omega_com_ref),
            ("mass_ref", self.mass_ref),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} = {v} must be > 0")));
            }
        }
        Ok(())
    }
}

/// Axial normal modes: ascending frequencies and the orthonormal
/// mass-weighted mode matrix. `m_tilde[j][n]` is the amplitude of mode `n`
/// at ion `j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxialModes {
    pub omega_1: f64,
    pub omega_2: f64,
    pub m_tilde: [[f64; 2]; 2],
}

impl AxialModes {
    pub fn omega(&self, n: usize) -> f64 {
        [self.omega_1, self.omega_2][n]
    }
}

/// Raman beam pair driving the spin-dependent optical dipole force.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RamanLasers {
    /// optical wavelength (m)
    pub wavelength: f64,
    /// angle between the beams (rad); |k_L| = 2·(2π/λ)·sin(angle/2)
    pub geometry_angle: f64,
    /// effective ODF Rabi frequency Ω_odf (rad/s)
    pub omega_odf: f64,
    /// beatnote detuning from the driven mode, δ_m (rad/s)
    pub detuning_delta_m: f64,
    /// detuning from the excited state, Δ_R (rad/s)
    pub big_detuning: f64,
    /// excited-state linewidth Γ (rad/s)
    pub gamma: f64,
    /// single-beam Rabi scale Ω₀ (rad/s)
    pub rabi_0: f64,
}

impl RamanLasers {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("wavelength", self.wavelength),
            ("geometry_angle", self.geometry_angle),
            ("omega_odf", self.omega_odf),
            ("detuning_delta_m", self.detuning_delta_m),
            ("big_detuning", self.big_detuning),
            ("gamma", self.gamma),
            ("rabi_0", self.rabi_0),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} = {v} must be > 0")));
            }
        }
        Ok(())
    }

    /// Effective wave vector magnitude of the beam pair.
    pub fn k_eff(&self) -> f64 {
        2.0 * (std::f64::consts::TAU / self.wavelength) * (self.geometry_angle / 2.0).sin()
    }

    /// True when the adiabatic elimination is marginal (Δ_R not ≫ Γ).
    pub fn detuning_warning(&self) -> bool {
        self.big_detuning < 100.0 * self.gamma
    }
}

/// Solve the two-ion axial eigenproblem.
///
/// Both ions share the static well, so each feels the spring constant
/// k = m_ref·ω_ref²; the Coulomb curvature at equilibrium equals k, giving
/// the mass-weighted Hessian [[2k/m₁, −k/√(m₁m₂)], [−k/√(m₁m₂), 2k/m₂]].
pub fn axial_normal_modes(crystal: &TwoIonCrystal) -> Result<AxialModes> {
    crystal.validate()?;
    let k = crystal.mass_ref * AMU * crystal.omega_com_ref * crystal.omega_com_ref;
    let m1 = crystal.mass_1 * AMU;
    let m2 = crystal.mass_2 * AMU;
    let a = 2.0 * k / m1;
    let c = 2.0 * k / m2;
    let b = -k / (m1 * m2).sqrt();
    let half_tr = 0.5 * (a + c);
    let disc = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    let (l1, l2) = (half_tr - disc, half_tr + disc);

    // eigenvector of the lower mode; the upper is its orthogonal complement
    let mut v1 = [b, l1 - a];
    let n1 = v1[0].hypot(v1[1]);
    v1 = [v1[0] / n1, v1[1] / n1];
    if v1[0] < 0.0 {
        v1 = [-v1[0], -v1[1]];
    }
    let mut v2 = [-v1[1], v1[0]];
    if v2[0] < 0.0 {
        v2 = [-v2[0], -v2[1]];
    }
    Ok(AxialModes {
        omega_1: l1.sqrt(),
        omega_2: l2.sqrt(),
        m_tilde: [[v1[0], v2[0]], [v1[1], v2[1]]],
    })
}

/// Lamb-Dicke factors of the given ion for both modes:
/// η_n = √(ħ/(2mω_n))·|M̃_{jn}|·|k_L|. The mode-amplitude sign is a phase
/// convention absorbed into the laser phase, so magnitudes are returned.
pub fn lamb_dicke(
    modes: &AxialModes,
    lasers: &RamanLasers,
    ion_index: usize,
    mass_amu: f64,
) -> Result<[f64; 2]> {
    lasers.validate()?;
    if ion_index > 1 {
        return Err(Error::InvalidParameter(format!("ion_index = {ion_index} must be 0 or 1")));
    }
    if !(mass_amu > 0.0) {
        return Err(Error::InvalidParameter(format!("mass = {mass_amu} must be > 0")));
    }
    let m = mass_amu * AMU;
    let k_l = lasers.k_eff();
    let mut eta = [0.0; 2];
    for (n, e) in eta.iter_mut().enumerate() {
        *e = (HBAR / (2.0 * m * modes.omega(n))).sqrt() * modes.m_tilde[ion_index][n].abs() * k_l;
    }
    Ok(eta)
}

/// λ = η·Ω_odf with the laser phase chosen so the coupling is real positive.
pub fn spin_motion_coupling(eta: f64, omega_odf: f64) -> f64 {
    (eta * omega_odf).abs()
}

/// Per-beam, per-spin-state Rabi frequencies Ω_{l,s} (l ∈ {0, 1}).
#[derive(Debug, Clone, Copy)]
pub struct RabiTable {
    pub up: [c64; 2],
    pub down: [c64; 2],
}

/// Per-beam, per-spin-state detunings δ_{l,s}; usually the single scalar
/// Δ_R for all four.
#[derive(Debug, Clone, Copy)]
pub struct DetuningTable {
    pub up: [f64; 2],
    pub down: [f64; 2],
}

impl DetuningTable {
    pub fn scalar(delta_r: f64) -> Self {
        Self { up: [delta_r; 2], down: [delta_r; 2] }
    }
}

/// Results of adiabatically eliminating the excited state.
#[derive(Debug, Clone, Copy)]
pub struct EffectiveFrequencies {
    /// stimulated-Raman couplings Ω^sr_{l′,l}, indexed [l′][l]
    pub omega_sr: [[c64; 2]; 2],
    /// ODF two-beam couplings Ω_s per spin state
    pub omega_up: c64,
    pub omega_down: c64,
    pub omega_odf: c64,
    pub omega_rw: c64,
    /// ac-Stark shifts Δε_s/ħ (rad/s)
    pub delta_eps_up: f64,
    pub delta_eps_down: f64,
}

/// Evaluate the effective second-order couplings for a beam pair:
///
/// ```text
/// Ω^sr_{l′,l} = −Ω*_{l,↑} Ω_{l′,↓} (δ_{l′,↓}+δ_{l,↑}) / ((2δ_{l′,↓}−iΓ)(2δ_{l,↑}+iΓ))
/// Ω_s        = −Ω*_{0,s} Ω_{1,s} (δ_{1,s}+δ_{0,s}) / ((2δ_{1,s}−iΓ)(2δ_{0,s}+iΓ))
/// Δε_s/ħ     = −Σ_l |Ω_{l,s}|² δ_{l,s} / (4δ_{l,s}² + Γ²)
/// Ω_odf = ½(Ω_↑* − Ω_↓*),  Ω_rw = ½(Ω_↑* + Ω_↓*)
/// ```
pub fn effective_rabi_frequencies(
    rabi: &RabiTable,
    det: &DetuningTable,
    gamma: f64,
) -> Result<EffectiveFrequencies> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidParameter(format!("gamma = {gamma} must be > 0")));
    }
    if det.up.iter().chain(&det.down).any(|&d| d == 0.0) {
        return Err(Error::InvalidParameter("detunings must be nonzero".into()));
    }
    let two_beam = |o_a: c64, d_a: f64, o_b: c64, d_b: f64| -> c64 {
        // −o_a* o_b (d_b + d_a) / ((2 d_b − iΓ)(2 d_a + iΓ))
        let num = -o_a.conj() * o_b * c64::new(d_b + d_a, 0.0);
        let den = c64::new(2.0 * d_b, -gamma) * c64::new(2.0 * d_a, gamma);
        num / den
    };
    let mut omega_sr = [[c64::new(0.0, 0.0); 2]; 2];
    for lp in 0..2 {
        for l in 0..2 {
            omega_sr[lp][l] = two_beam(rabi.up[l], det.up[l], rabi.down[lp], det.down[lp]);
        }
    }
    let omega_up = two_beam(rabi.up[0], det.up[0], rabi.up[1], det.up[1]);
    let omega_down = two_beam(rabi.down[0], det.down[0], rabi.down[1], det.down[1]);
    let stark = |o: &[c64; 2], d: &[f64; 2]| -> f64 {
        -(0..2)
            .map(|l| o[l].norm_sqr() * d[l] / (4.0 * d[l] * d[l] + gamma * gamma))
            .sum::<f64>()
    };
    Ok(EffectiveFrequencies {
        omega_sr,
        omega_up,
        omega_down,
        omega_odf: (omega_up.conj() - omega_down.conj()) * 0.5,
        omega_rw: (omega_up.conj() + omega_down.conj()) * 0.5,
        delta_eps_up: stark(&rabi.up, &det.up),
        delta_eps_down: stark(&rabi.down, &det.down),
    })
}

/// Coefficient magnitudes of the four residual scattering Lindblad
/// operators, plus the rough total rate Γ_eff = Γ·Ω_L/Δ_R.
#[derive(Debug, Clone, Copy)]
pub struct ScatteringRates {
    /// Rayleigh (σz) coefficients
    pub l_up_up: f64,
    pub l_down_down: f64,
    /// Raman (σ±) coefficients
    pub l_up_down: f64,
    pub l_down_up: f64,
    pub gamma_eff: f64,
}

pub fn scattering_rates(
    rabi: &RabiTable,
    big_detuning: f64,
    gamma_up: f64,
    gamma_down: f64,
    rabi_0: f64,
) -> Result<ScatteringRates> {
    if !(gamma_up + gamma_down > 0.0) {
        return Err(Error::InvalidParameter("gamma_up + gamma_down must be > 0".into()));
    }
    if !(big_detuning > 0.0) {
        return Err(Error::InvalidParameter("big_detuning must be > 0".into()));
    }
    let sum_sq = |o: &[c64; 2]| o.iter().map(|x| x.norm_sqr()).sum::<f64>();
    let d2 = 4.0 * big_detuning * big_detuning;
    let gamma = gamma_up + gamma_down;
    let omega_l = rabi_0 * rabi_0 / (2.0 * big_detuning);
    Ok(ScatteringRates {
        l_up_up: 0.5 * (gamma_up * sum_sq(&rabi.up) / d2).sqrt(),
        l_down_down: 0.5 * (gamma_down * sum_sq(&rabi.down) / d2).sqrt(),
        l_up_down: (gamma_up * sum_sq(&rabi.down) / d2).sqrt(),
        l_down_up: (gamma_down * sum_sq(&rabi.up) / d2).sqrt(),
        gamma_eff: gamma * omega_l / big_detuning,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegimeStatus {
    Pass,
    Warn,
    Fail,
}

impl RegimeStatus {
    pub fn of(value: f64) -> Self {
        if value < 0.05 {
            RegimeStatus::Pass
        } else if value < 0.2 {
            RegimeStatus::Warn
        } else {
            RegimeStatus::Fail
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            RegimeStatus::Pass => "pass",
            RegimeStatus::Warn => "warn",
            RegimeStatus::Fail => "fail",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RegimeRatio {
    pub name: &'static str,
    pub value: f64,
    pub status: RegimeStatus,
}

#[derive(Debug, Clone)]
pub struct RegimeReport {
    pub ratios: Vec<RegimeRatio>,
}

impl RegimeReport {
    pub fn worst(&self) -> RegimeStatus {
        if self.ratios.iter().any(|r| r.status == RegimeStatus::Fail) {
            RegimeStatus::Fail
        } else if self.ratios.iter().any(|r| r.status == RegimeStatus::Warn) {
            RegimeStatus::Warn
        } else {
            RegimeStatus::Pass
        }
    }
}

/// Everything the regime checker needs: the engineered mode and the drive
/// geometry around it.
#[derive(Debug, Clone, Copy)]
pub struct RegimeInput {
    /// effective mode frequency δ_m (rad/s)
    pub omega_m: f64,
    pub kappa: f64,
    pub nbar: f64,
    /// in-phase (spectator) mode frequency (rad/s)
    pub omega_1: f64,
    /// effective laser beatnote ω_L (rad/s)
    pub omega_l: f64,
    /// spectator-mode Lamb-Dicke factor
    pub eta_1: f64,
    pub omega_odf: f64,
}

/// All small-parameter ratios of the engineered-reservoir construction,
/// each graded pass (< 0.05) / warn (< 0.2) / fail.
pub fn regime_check(input: &RegimeInput) -> RegimeReport {
    let hbar_beta_kappa = if input.nbar > 0.0 {
        (1.0 + 1.0 / input.nbar).ln() * input.kappa / input.omega_m
    } else if input.kappa == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    let entries = [
        ("kappa/omega_m", input.kappa / input.omega_m),
        ("hbar_beta*kappa", hbar_beta_kappa),
        ("kappa/nu_1", hbar_beta_kappa / std::f64::consts::TAU),
        ("omega_odf/(2 omega_L)", input.omega_odf / (2.0 * input.omega_l)),
        (
            "eta_1*omega_odf/|omega_1 - omega_L|",
            input.eta_1 * input.omega_odf / (input.omega_1 - input.omega_l).abs(),
        ),
    ];
    RegimeReport {
        ratios: entries
            .iter()
            .map(|&(name, value)| RegimeRatio { name, value, status: RegimeStatus::of(value) })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::hz_to_angular;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_2;

    fn paper_crystal() -> TwoIonCrystal {
        TwoIonCrystal {
            mass_1: 24.0,
            mass_2: 25.0,
            omega_com_ref: hz_to_angular(2.54e6),
            mass_ref: 24.0,
        }
    }

    fn paper_lasers() -> RamanLasers {
        RamanLasers {
            wavelength: 280e-9,
            geometry_angle: FRAC_PI_2,
            omega_odf: hz_to_angular(666.7e3),
            detuning_delta_m: hz_to_angular(100e3),
            big_detuning: hz_to_angular(500e9),
            gamma: hz_to_angular(41.8e6),
            rabi_0: hz_to_angular(100e6),
        }
    }

    #[test]
    fn equal_mass_modes() {
        let c = TwoIonCrystal {
            mass_1: 24.0,
            mass_2: 24.0,
            omega_com_ref: 1.0,
            mass_ref: 24.0,
        };
        let m = axial_normal_modes(&c).unwrap();
        assert!((m.omega_1 - 1.0).abs() < 1e-12);
        assert!((m.omega_2 - 3.0f64.sqrt()).abs() < 1e-12);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((m.m_tilde[0][0] - s).abs() < 1e-12);
        assert!((m.m_tilde[1][0] - s).abs() < 1e-12);
        assert!((m.m_tilde[0][1] - s).abs() < 1e-12);
        assert!((m.m_tilde[1][1] + s).abs() < 1e-12);
    }

    #[test]
    fn paper_mixed_crystal_frequencies() {
        let m = axial_normal_modes(&paper_crystal()).unwrap();
        let f1 = m.omega_1 / std::f64::consts::TAU;
        let f2 = m.omega_2 / std::f64::consts::TAU;
        assert!((f1 - 2.51e6).abs() / 2.51e6 < 0.01, "f1 = {f1:e}");
        assert!((f2 - 4.36e6).abs() / 4.36e6 < 0.01, "f2 = {f2:e}");
        assert!(m.omega_1 < m.omega_2);
    }

    #[test]
    fn mode_matrix_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let c = TwoIonCrystal {
                mass_1: rng.gen_range(1.0..200.0),
                mass_2: rng.gen_range(1.0..200.0),
                omega_com_ref: rng.gen_range(1e5..1e8),
                mass_ref: rng.gen_range(1.0..200.0),
            };
            let m = axial_normal_modes(&c).unwrap();
            let mt = m.m_tilde;
            for a in 0..2 {
                for b in 0..2 {
                    let dot: f64 = (0..2).map(|j| mt[j][a] * mt[j][b]).sum();
                    let want = if a == b { 1.0 } else { 0.0 };
                    assert!((dot - want).abs() < 1e-12);
                }
            }
            assert!(m.omega_1 < m.omega_2);
        }
    }

    #[test]
    fn paper_lamb_dicke() {
        let modes = axial_normal_modes(&paper_crystal()).unwrap();
        let eta = lamb_dicke(&modes, &paper_lasers(), 1, 25.0).unwrap();
        assert!((eta[1] - 0.15).abs() / 0.15 < 0.10, "eta_2 = {}", eta[1]);
    }

    #[test]
    fn lamb_dicke_scalings() {
        let modes = axial_normal_modes(&paper_crystal()).unwrap();
        let mut zero_angle = paper_lasers();
        zero_angle.geometry_angle = 1e-300;
        let eta0 = lamb_dicke(&modes, &zero_angle, 1, 25.0).unwrap();
        assert!(eta0[0] < 1e-290 && eta0[1] < 1e-290);

        // eta ~ 1/sqrt(omega)
        let mut doubled = modes;
        doubled.omega_1 *= 2.0;
        doubled.omega_2 *= 2.0;
        let e1 = lamb_dicke(&modes, &paper_lasers(), 1, 25.0).unwrap();
        let e2 = lamb_dicke(&doubled, &paper_lasers(), 1, 25.0).unwrap();
        for n in 0..2 {
            assert!((e2[n] * 2.0f64.sqrt() - e1[n]).abs() < 1e-12 * e1[n].max(1e-30));
        }
    }

    #[test]
    fn coupling_knob() {
        let lam = spin_motion_coupling(0.15, hz_to_angular(666.7e3));
        assert!((lam - hz_to_angular(100e3)).abs() / hz_to_angular(100e3) < 2e-3);
        assert_eq!(spin_motion_coupling(0.0, 1.0), 0.0);
        assert!((spin_motion_coupling(0.3, 5.0) - 2.0 * spin_motion_coupling(0.15, 5.0)).abs() < 1e-15);
    }

    #[test]
    fn symmetric_illumination_gives_no_force() {
        let o0 = 1.0e6;
        let dr = 1.0e10;
        let rabi = RabiTable {
            up: [c64::new(o0, 0.0); 2],
            down: [c64::new(o0, 0.0); 2],
        };
        // tiny gamma approximates the stated limit
        let eff = effective_rabi_frequencies(&rabi, &DetuningTable::scalar(dr), 1e-3).unwrap();
        let want = -o0 * o0 / (2.0 * dr);
        assert!((eff.omega_up.re - want).abs() / want.abs() < 1e-10);
        assert!((eff.omega_down.re - want).abs() / want.abs() < 1e-10);
        assert!(eff.omega_odf.norm() < 1e-12 * want.abs());
        assert!((eff.omega_rw.re - want).abs() / want.abs() < 1e-10);
    }

    #[test]
    fn antisymmetric_illumination_gives_pure_force() {
        let o0 = 1.0e6;
        let dr = 1.0e10;
        // flip one beam's down-state Rabi frequency
        let rabi = RabiTable {
            up: [c64::new(o0, 0.0); 2],
            down: [c64::new(o0, 0.0), c64::new(-o0, 0.0)],
        };
        let eff = effective_rabi_frequencies(&rabi, &DetuningTable::scalar(dr), 1e-3).unwrap();
        let scale = o0 * o0 / (2.0 * dr);
        assert!(eff.omega_rw.norm() < 1e-12 * scale);
        assert!((eff.omega_odf.norm() - scale).abs() / scale < 1e-10);
    }

    #[test]
    fn stark_shift_limit() {
        let o0 = 2.0e6;
        let delta = 5.0e10;
        let rabi = RabiTable {
            up: [c64::new(o0, 0.0), c64::new(0.0, 0.0)],
            down: [c64::new(0.0, 0.0); 2],
        };
        let eff = effective_rabi_frequencies(&rabi, &DetuningTable::scalar(delta), 1.0).unwrap();
        let want = -o0 * o0 / (4.0 * delta);
        assert!((eff.delta_eps_up - want).abs() / want.abs() < 1e-10);
        assert_eq!(eff.delta_eps_down, 0.0);
    }

    #[test]
    fn swapping_spin_tables_negates_odf() {
        let rabi = RabiTable {
            up: [c64::new(1.0e6, 2.0e5), c64::new(8.0e5, -1.0e5)],
            down: [c64::new(9.0e5, 0.0), c64::new(1.1e6, 3.0e5)],
        };
        let det = DetuningTable::scalar(1.0e10);
        let g = 2.0e8;
        let eff = effective_rabi_frequencies(&rabi, &det, g).unwrap();
        let swapped = RabiTable { up: rabi.down, down: rabi.up };
        let eff2 = effective_rabi_frequencies(&swapped, &det, g).unwrap();
        assert!((eff2.omega_up - eff.omega_down).norm() < 1e-9);
        assert!((eff2.omega_down - eff.omega_up).norm() < 1e-9);
        assert!((eff2.omega_odf + eff.omega_odf).norm() < 1e-9);
        assert!((eff2.omega_rw - eff.omega_rw).norm() < 1e-9);
    }

    #[test]
    fn scattering_rate_examples() {
        let zero = RabiTable { up: [c64::new(0.0, 0.0); 2], down: [c64::new(0.0, 0.0); 2] };
        let r = scattering_rates(&zero, 1e10, 1.0, 1.0, 0.0).unwrap();
        assert_eq!((r.l_up_up, r.l_down_down, r.l_up_down, r.l_down_up), (0.0, 0.0, 0.0, 0.0));

        let o0 = 1.0e6;
        let dr = 1.0e10;
        let (gu, gd) = (3.0e7, 1.0e7);
        let full = RabiTable { up: [c64::new(o0, 0.0); 2], down: [c64::new(o0, 0.0); 2] };
        let r = scattering_rates(&full, dr, gu, gd, o0).unwrap();
        let want = o0 * (gu / 2.0).sqrt() / dr;
        assert!((r.l_up_down - want).abs() / want < 1e-12);

        // gamma_eff ~ 1/Delta_R^2
        let r2 = scattering_rates(&full, 2.0 * dr, gu, gd, o0).unwrap();
        assert!((r.gamma_eff / r2.gamma_eff - 4.0).abs() < 1e-10);
    }

    #[test]
    fn regime_check_paper_params() {
        let input = RegimeInput {
            omega_m: hz_to_angular(100e3),
            kappa: hz_to_angular(1.25e3),
            nbar: 0.025,
            omega_1: hz_to_angular(2.51e6),
            omega_l: hz_to_angular(4.36e6) - hz_to_angular(100e3),
            eta_1: 0.15,
            omega_odf: hz_to_angular(666.7e3),
        };
        let report = regime_check(&input);
        let get = |name: &str| report.ratios.iter().find(|r| r.name == name).unwrap();
        let r1 = get("kappa/omega_m");
        assert!((r1.value - 0.0125).abs() < 1e-12);
        assert_eq!(r1.status, RegimeStatus::Pass);
        let r3 = get("kappa/nu_1");
        assert!((r3.value - 7.4e-3).abs() < 1e-4, "kappa/nu_1 = {}", r3.value);
        assert_eq!(r3.status, RegimeStatus::Pass);
        let r2 = get("hbar_beta*kappa");
        assert!((r2.value - (41.0f64).ln() * 0.0125).abs() < 1e-4);
    }

    #[test]
    fn regime_check_fails_strong_damping() {
        let input = RegimeInput {
            omega_m: 1.0,
            kappa: 1.0,
            nbar: 0.025,
            omega_1: 10.0,
            omega_l: 5.0,
            eta_1: 0.1,
            omega_odf: 0.01,
        };
        let report = regime_check(&input);
        assert_eq!(report.worst(), RegimeStatus::Fail);
        assert_eq!(report.ratios[0].status, RegimeStatus::Fail);
    }
}

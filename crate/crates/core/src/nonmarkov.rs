//! Non-Markovianity measures of the reduced spin dynamics.
//!
//! The spin's dynamical map E(t, t₀) is reconstructed by evolving the four
//! operator-basis initial conditions |k⟩⟨j| ⊗ ρ_β and tracing out the modes.
//! Vectors are ordered row-major, v = [ρ_↑↑, ρ_↑↓, ρ_↓↑, ρ_↓↓]ᵀ, so the map
//! for the interval (t₁, t₂) is E(t₂,t₀)E⁻¹(t₁,t₀). Two measures are built
//! on top:
//!
//! * RHP: g(t_i) = (‖Choi(E(t_{i+1},t_i))‖₁ − 1)/Δt detects non-CP
//!   intermediate maps; N_RHP = Σ tanh g / #{g > 0}.
//! * BLP: positive increments of the trace distance between evolved
//!   orthogonal spin-state pairs (a lower bound without pair maximization).

use faer::c64;

use crate::error::{Error, Result};
use crate::linalg::{
    expm, hermitian_trace_norm, identity, inverse_with_cond, scale, unvec_col,
    vec_col, CMat, ONE, ZERO,
};
use crate::lindblad::{thermal_state, DensityMatrix, Liouvillian, SystemSpec};

pub use crate::lindblad::trace_distance;

/// Spin dynamical maps E(t_i, t₀) on a common origin t₀ = times[0].
#[derive(Debug, Clone)]
pub struct DynamicalMapSeries {
    pub times: Vec<f64>,
    pub maps: Vec<CMat>,
}

impl DynamicalMapSeries {
    /// Largest violation of Hermiticity consistency: a map must send
    /// Hermitian inputs to Hermitian outputs, i.e. column(|↓⟩⟨↑|) is the
    /// row-swapped conjugate of column(|↑⟩⟨↓|) and the diagonal-input
    /// columns are self-consistent.
    pub fn hermiticity_consistency_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for e in &self.maps {
            for p in 0..2 {
                for q in 0..2 {
                    let r = 2 * p + q;
                    let rs = 2 * q + p;
                    worst = worst.max((e[(r, 2)] - e[(rs, 1)].conj()).norm());
                    worst = worst.max((e[(r, 0)] - e[(rs, 0)].conj()).norm());
                    worst = worst.max((e[(r, 3)] - e[(rs, 3)].conj()).norm());
                }
            }
        }
        worst
    }
}

/// Trace out every mode factor (spin is the first tensor factor).
pub fn partial_trace_spin(full: &CMat, env_dim: usize) -> CMat {
    assert_eq!(full.nrows(), 2 * env_dim);
    CMat::from_fn(2, 2, |s, sp| {
        (0..env_dim).map(|m| full[(s * env_dim + m, sp * env_dim + m)]).sum()
    })
}

/// Thermal product state of all modes in `spec`.
pub fn environment_state(spec: &SystemSpec) -> CMat {
    let mut rho = identity(1);
    for m in &spec.modes {
        rho = crate::linalg::kron(&rho, &thermal_state(m.nbar, m.n_max).mat);
    }
    rho
}

/// Reconstruct the spin maps for an arbitrary generator and environment
/// state. `liou` acts on the full (2·env_dim)-dimensional space in
/// column-stacking convention; the returned maps use the row-major spin
/// vector ordering.
pub fn reconstruct_maps_from_liouvillian(
    liou: &Liouvillian,
    env_dim: usize,
    rho_env: &CMat,
    times: &[f64],
) -> Result<DynamicalMapSeries> {
    let dim = 2 * env_dim;
    if liou.dim != dim || rho_env.nrows() != env_dim {
        return Err(Error::DimMismatch(format!(
            "generator dim {} vs 2 x env dim {env_dim}",
            liou.dim
        )));
    }
    if times.is_empty() || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(
            "time grid must be non-empty and strictly ascending".into(),
        ));
    }
    let ldense = liou.op.to_dense();
    let mut props: std::collections::HashMap<u64, CMat> = std::collections::HashMap::new();

    // basis initial conditions |k><j| (x) rho_env, vectorized column-stacking
    let mut states: Vec<CMat> = (0..4)
        .map(|col| {
            let (k, j) = (col / 2, col % 2);
            let full = CMat::from_fn(dim, dim, |r, c| {
                if r / env_dim == k && c / env_dim == j {
                    rho_env[(r % env_dim, c % env_dim)]
                } else {
                    ZERO
                }
            });
            let v = vec_col(&full);
            CMat::from_fn(dim * dim, 1, |i, _| v[i])
        })
        .collect();

    let mut maps = Vec::with_capacity(times.len());
    let mut t_prev = times[0];
    for &t in times {
        let dt = t - t_prev;
        if dt > 0.0 {
            let prop = props
                .entry(dt.to_bits())
                .or_insert_with(|| expm(&scale(c64::new(dt, 0.0), &ldense)));
            for s in &mut states {
                *s = &*prop * &*s;
            }
        }
        t_prev = t;
        let mut e = CMat::zeros(4, 4);
        for (col, s) in states.iter().enumerate() {
            let v: Vec<c64> = (0..dim * dim).map(|i| s[(i, 0)]).collect();
            let reduced = partial_trace_spin(&unvec_col(&v, dim), env_dim);
            for p in 0..2 {
                for q in 0..2 {
                    e[(2 * p + q, col)] = reduced[(p, q)];
                }
            }
        }
        maps.push(e);
    }
    Ok(DynamicalMapSeries { times: times.to_vec(), maps })
}

/// Reconstruct the spin maps of the full spin ⊗ damped-modes model, with
/// every mode starting in its thermal state.
pub fn reconstruct_maps(spec: &SystemSpec, times: &[f64]) -> Result<DynamicalMapSeries> {
    spec.validate()?;
    let liou = Liouvillian::from_spec(spec)?;
    let env_dim = spec.dim() / 2;
    reconstruct_maps_from_liouvillian(&liou, env_dim, &environment_state(spec), times)
}

/// Condition-number guard for inverting E(t₁, t₀).
pub const MAP_COND_LIMIT: f64 = 1e12;

/// E(t_i, t_j) = E(t_i, t₀) E⁻¹(t_j, t₀).
pub fn intermediate_map(series: &DynamicalMapSeries, i: usize, j: usize) -> Result<CMat> {
    assert!(j <= i && i < series.maps.len(), "need j <= i within the series");
    let (inv, cond) = inverse_with_cond(&series.maps[j]);
    if !cond.is_finite() || cond > MAP_COND_LIMIT {
        return Err(Error::SingularMap { index: j, cond });
    }
    Ok(&series.maps[i] * &inv)
}

/// Choi matrix (1/2)E^R by the exact index reshuffle
/// E^R[2a+b, 2c+d] = E[2a+c, 2b+d].
pub fn reshuffle(e: &CMat) -> CMat {
    assert_eq!((e.nrows(), e.ncols()), (4, 4));
    CMat::from_fn(4, 4, |r, c| {
        let (a, b) = (r / 2, r % 2);
        let (cc, d) = (c / 2, c % 2);
        e[(2 * a + cc, 2 * b + d)] * c64::new(0.5, 0.0)
    })
}

/// The raw index permutation without the 1/d scale (an involution).
pub fn reshuffle_unscaled(e: &CMat) -> CMat {
    CMat::from_fn(4, 4, |r, c| {
        let (a, b) = (r / 2, r % 2);
        let (cc, d) = (c / 2, c % 2);
        e[(2 * a + cc, 2 * b + d)]
    })
}

/// Default positivity floor under which ‖Choi‖₁ − 1 is treated as exact zero.
pub const G_FLOOR: f64 = 1e-14;

/// Floor under which a positive trace-distance increment is treated as exact
/// zero (roundoff from numerically unitary or contractive evolution, not a
/// genuine information backflow).
pub const D_FLOOR: f64 = 1e-12;

/// Discrete RHP rate g(t_i) for the interval (t_i, t_{i+1}).
pub fn g_discrete(series: &DynamicalMapSeries, i: usize, threshold: f64) -> Result<f64> {
    assert!(i + 1 < series.times.len(), "need i < last index");
    let e = intermediate_map(series, i + 1, i)?;
    let choi = reshuffle(&e);
    let numer = hermitian_trace_norm(&choi) - 1.0;
    if numer < threshold {
        return Ok(0.0);
    }
    Ok(numer / (series.times[i + 1] - series.times[i]))
}

#[derive(Debug, Clone)]
pub struct RhpOutcome {
    /// (t_i, g(t_i)) for every interval start.
    pub g: Vec<(f64, f64)>,
    pub n_rhp: f64,
}

/// N_RHP = Σ tanh g(t_i) / #{g > 0}, defined as 0 when no interval is
/// positive. Always in [0, 1].
pub fn n_rhp(series: &DynamicalMapSeries, threshold: f64) -> Result<RhpOutcome> {
    assert!(series.times.len() >= 2, "need at least two times");
    let mut g = Vec::with_capacity(series.times.len() - 1);
    let mut sum = 0.0;
    let mut count = 0usize;
    for i in 0..series.times.len() - 1 {
        let gi = g_discrete(series, i, threshold)?;
        if gi > 0.0 {
            sum += gi.tanh();
            count += 1;
        }
        g.push((series.times[i], gi));
    }
    let n_rhp = if count == 0 { 0.0 } else { sum / count as f64 };
    Ok(RhpOutcome { g, n_rhp })
}

/// The canonical orthogonal spin-state pairs: the eigenstate pairs of
/// σz, σx and σy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinPair {
    ZUpDown,
    XPlusMinus,
    YPlusMinus,
}

impl SpinPair {
    pub const ALL: [SpinPair; 3] = [SpinPair::ZUpDown, SpinPair::XPlusMinus, SpinPair::YPlusMinus];

    pub fn label(&self) -> &'static str {
        match self {
            SpinPair::ZUpDown => "z",
            SpinPair::XPlusMinus => "x",
            SpinPair::YPlusMinus => "y",
        }
    }

    /// The two pure spin density matrices of the pair.
    pub fn states(&self) -> (CMat, CMat) {
        let proj = |a: c64, b: c64| {
            CMat::from_fn(2, 2, |i, j| {
                let v = [a, b];
                v[i] * v[j].conj()
            })
        };
        let h = c64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let ih = c64::new(0.0, std::f64::consts::FRAC_1_SQRT_2);
        match self {
            SpinPair::ZUpDown => (proj(ONE, ZERO), proj(ZERO, ONE)),
            SpinPair::XPlusMinus => (proj(h, h), proj(h, -h)),
            SpinPair::YPlusMinus => (proj(h, ih), proj(h, -ih)),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BlpPairResult {
    pub pair: SpinPair,
    /// (t_i, D(t_i)) trace-distance series of the reduced spin states.
    pub d: Vec<(f64, f64)>,
    /// Sum of positive increments of D over the grid.
    pub measure: f64,
}

#[derive(Debug, Clone)]
pub struct BlpOutcome {
    pub pairs: Vec<BlpPairResult>,
    /// max over the pair set — a lower bound on the BLP supremum.
    pub n_blp: f64,
}

fn apply_map_to_spin(e: &CMat, rho_spin: &CMat) -> DensityMatrix {
    // row-major spin vector [rho_00, rho_01, rho_10, rho_11]
    let v = [
        rho_spin[(0, 0)],
        rho_spin[(0, 1)],
        rho_spin[(1, 0)],
        rho_spin[(1, 1)],
    ];
    let out = CMat::from_fn(2, 2, |p, q| (0..4).map(|c| e[(2 * p + q, c)] * v[c]).sum());
    DensityMatrix { mat: out }
}

/// BLP lower bound from a reconstructed map series: the evolved reduced
/// state of any spin ⊗ ρ_β product input is the map applied to the spin
/// part, so the pair dynamics come for free from the same four propagations.
pub fn n_blp_lower_bound_from_maps(series: &DynamicalMapSeries, pairs: &[SpinPair]) -> BlpOutcome {
    let mut results = Vec::with_capacity(pairs.len());
    for &pair in pairs {
        let (r1, r2) = pair.states();
        let mut d = Vec::with_capacity(series.times.len());
        let mut measure = 0.0;
        let mut prev = f64::NAN;
        for (e, &t) in series.maps.iter().zip(&series.times) {
            let a = apply_map_to_spin(e, &r1);
            let b = apply_map_to_spin(e, &r2);
            let dist = trace_distance(&a, &b);
            if !prev.is_nan() && dist - prev > D_FLOOR {
                measure += dist - prev;
            }
            prev = dist;
            d.push((t, dist));
        }
        results.push(BlpPairResult { pair, d, measure });
    }
    let n_blp = results.iter().map(|r| r.measure).fold(0.0, f64::max);
    BlpOutcome { pairs: results, n_blp }
}

/// Evolve each canonical pair (spin states tensored with the thermal mode
/// state) and accumulate positive trace-distance increments.
pub fn n_blp_lower_bound(
    spec: &SystemSpec,
    pairs: &[SpinPair],
    times: &[f64],
) -> Result<BlpOutcome> {
    let series = reconstruct_maps(spec, times)?;
    Ok(n_blp_lower_bound_from_maps(&series, pairs))
}

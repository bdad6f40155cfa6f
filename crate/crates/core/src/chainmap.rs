//! Chain mapping of a spectral density and a desk-scale exact oracle.
//!
//! The environment with spectral density J(ω) is unitarily equivalent to a
//! semi-infinite nearest-neighbour chain whose site energies ω_n and
//! hoppings t_n are the three-term recurrence coefficients of the
//! polynomials orthogonal w.r.t. dμ(ω) = J(ω)/π dω on [0, ω_max]:
//!
//! ```text
//! H_1D/ħ = (δ/2)σz + (Ω_d/2)σx − (t₀/2)σz(b₀+b₀†)
//!          + Σ ω_n b_n†b_n + Σ t_{n+1}(b_n†b_{n+1} + h.c.)
//! ```
//!
//! with t₀² = ∫ J/π dω. Coefficients come from Lanczos on a carefully
//! discretized measure; the oracle evolves spin + truncated chain exactly
//! from the chain vacuum.

use faer::c64;

use crate::error::{Error, Result};
use crate::linalg::{Csr, expi_hermitian_action, ZERO};
use crate::lindblad::SpinParams;
use crate::spectral::TargetSpectralDensity;

/// Discrete representation of dμ = J(ω)/π dω on (0, ω_max].
#[derive(Debug, Clone)]
pub struct DiscretizedMeasure {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub omega_max: f64,
}

impl DiscretizedMeasure {
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Chain coefficients: `omega[n]` are site energies, `hoppings[n]` couples
/// sites n and n+1, `t0` couples the spin to site 0.
#[derive(Debug, Clone)]
pub struct ChainCoefficients {
    pub omega: Vec<f64>,
    pub hoppings: Vec<f64>,
    pub t0: f64,
}

impl ChainCoefficients {
    pub fn n_chain(&self) -> usize {
        self.omega.len()
    }
}

// Cell partition: a uniform grid over [0, omega_max] merged with
// arctan-equidistant boundaries around each Lorentzian resonance, so sharp
// peaks get cells a small fraction of a linewidth wide while tails keep the
// uniform resolution.
fn cell_boundaries(j: &TargetSpectralDensity, omega_max: f64, n_cells: usize) -> Vec<f64> {
    let resonances: Vec<(f64, f64)> = match j {
        TargetSpectralDensity::Composite(c) => c
            .components
            .iter()
            .filter(|k| k.omega_m() < omega_max)
            .map(|k| (k.omega_m(), k.kappa()))
            .collect(),
        TargetSpectralDensity::Tabulated { .. } => Vec::new(),
    };
    let n_uniform = if resonances.is_empty() { n_cells } else { n_cells / 2 };
    let mut bounds: Vec<f64> = (0..=n_uniform)
        .map(|i| omega_max * i as f64 / n_uniform as f64)
        .collect();
    if !resonances.is_empty() {
        let per_res = (n_cells - n_uniform) / resonances.len();
        for &(om, kap) in &resonances {
            let u_lo = (-om / kap).atan();
            let u_hi = ((omega_max - om) / kap).atan();
            for i in 1..per_res {
                let u = u_lo + (u_hi - u_lo) * i as f64 / per_res as f64;
                bounds.push(om + kap * u.tan());
            }
        }
    }
    bounds.sort_by(f64::total_cmp);
    let min_sep = omega_max * 1e-12;
    bounds.dedup_by(|b, a| *b - *a < min_sep);
    bounds
}

// 4-point Gauss–Legendre abscissae and weights on [-1, 1]
const GL4_X: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];
const GL4_W: [f64; 4] = [
    0.347_854_845_137_453_86,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_86,
];

/// Discretize dμ = J/π dω into `n_nodes` nodes: the partition cells each
/// carry a 4-point Gauss–Legendre rule, so piecewise-polynomial moments are
/// reproduced to degree 7 per cell.
pub fn discretize_measure(
    j: &TargetSpectralDensity,
    omega_max: f64,
    n_nodes: usize,
) -> Result<DiscretizedMeasure> {
    if !(omega_max > 0.0) {
        return Err(Error::InvalidParameter(format!("omega_max = {omega_max} must be > 0")));
    }
    if n_nodes < 8 {
        return Err(Error::InvalidParameter("n_nodes must be >= 8".into()));
    }
    let bounds = cell_boundaries(j, omega_max, n_nodes / 4);
    let mut nodes = Vec::with_capacity(n_nodes);
    let mut weights = Vec::with_capacity(n_nodes);
    for cell in bounds.windows(2) {
        let (a, b) = (cell[0], cell[1]);
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        for (&x, &w) in GL4_X.iter().zip(&GL4_W) {
            let om = c + h * x;
            let dens = j.eval(om) / std::f64::consts::PI;
            if dens < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "spectral density is negative at omega = {om:e}"
                )));
            }
            nodes.push(om);
            weights.push(w * h * dens);
        }
    }
    Ok(DiscretizedMeasure { nodes, weights, omega_max })
}

/// Three-term recurrence coefficients of the discretized measure via
/// Lanczos on diag(ω) with the weighted inner product and full
/// reorthogonalization.
pub fn chain_coefficients(m: &DiscretizedMeasure, n_chain: usize) -> Result<ChainCoefficients> {
    let n = m.nodes.len();
    if n_chain == 0 {
        return Err(Error::InvalidParameter("n_chain must be >= 1".into()));
    }
    if n_chain > n / 2 {
        return Err(Error::InvalidParameter(format!(
            "n_chain = {n_chain} exceeds n_nodes/2 = {} (stability guard)",
            n / 2
        )));
    }
    let beta0 = m.total_weight();
    if !(beta0 > 0.0) {
        return Err(Error::RecurrenceBreakdown { index: 0, beta: beta0 });
    }
    let dot = |f: &[f64], g: &[f64]| -> f64 {
        f.iter().zip(g).zip(&m.weights).map(|((a, b), w)| a * b * w).sum()
    };

    let mut q_prev = vec![0.0; n];
    let mut q = vec![1.0 / beta0.sqrt(); n];
    let mut basis: Vec<Vec<f64>> = vec![q.clone()];
    let mut alpha = Vec::with_capacity(n_chain);
    let mut beta = Vec::with_capacity(n_chain);
    let mut b_prev = 0.0;
    for k in 0..n_chain {
        let mut w: Vec<f64> = m.nodes.iter().zip(&q).map(|(x, qi)| x * qi).collect();
        let a_k = dot(&w, &q);
        alpha.push(a_k);
        for i in 0..n {
            w[i] -= a_k * q[i] + b_prev * q_prev[i];
        }
        // full reorthogonalization against the stored basis (twice)
        for _ in 0..2 {
            for qb in &basis {
                let c = dot(&w, qb);
                for i in 0..n {
                    w[i] -= c * qb[i];
                }
            }
        }
        if k + 1 == n_chain {
            break;
        }
        let b2 = dot(&w, &w);
        if !(b2 > 0.0) {
            return Err(Error::RecurrenceBreakdown { index: k + 1, beta: b2 });
        }
        let b_k = b2.sqrt();
        beta.push(b_k);
        q_prev = std::mem::replace(&mut q, w.iter().map(|x| x / b_k).collect());
        basis.push(q.clone());
        b_prev = b_k;
    }
    Ok(ChainCoefficients { omega: alpha, hoppings: beta, t0: beta0.sqrt() })
}

/// Bound on the spin ⊗ chain Hilbert dimension 2·d_max^N.
pub const CHAIN_DIM_CAP: usize = 40_000;

/// Exact unitary evolution of the spin + truncated chain from
/// |spin₀⟩ ⊗ |vacuum⟩ (zero-temperature oracle), returning (t, ⟨σ_z⟩).
pub fn exact_chain_evolution(
    spin: &SpinParams,
    chain: &ChainCoefficients,
    d_max: usize,
    n_sites: usize,
    spin0: [c64; 2],
    times: &[f64],
) -> Result<Vec<(f64, f64)>> {
    if d_max < 2 {
        return Err(Error::InvalidParameter("d_max must be >= 2".into()));
    }
    if n_sites == 0 || n_sites > chain.n_chain() {
        return Err(Error::InvalidParameter(format!(
            "n_sites = {n_sites} must be in 1..={}",
            chain.n_chain()
        )));
    }
    let chain_dim = d_max.checked_pow(n_sites as u32).ok_or(Error::DimensionCap {
        dim: usize::MAX,
        cap: CHAIN_DIM_CAP,
    })?;
    let dim = 2 * chain_dim;
    if dim > CHAIN_DIM_CAP {
        return Err(Error::DimensionCap { dim, cap: CHAIN_DIM_CAP });
    }
    let norm0 = (spin0[0].norm_sqr() + spin0[1].norm_sqr()).sqrt();
    if (norm0 - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidParameter(format!(
            "spin state must be normalized, got norm {norm0}"
        )));
    }
    if times.is_empty() || times.windows(2).any(|w| w[1] <= w[0]) || times[0] < 0.0 {
        return Err(Error::InvalidParameter(
            "time grid must be non-negative and strictly ascending".into(),
        ));
    }

    // basis index: i = s * chain_dim + m, occupation of site k is the k-th
    // base-d_max digit of m
    let occ = |m: usize, k: usize| (m / d_max.pow(k as u32)) % d_max;
    let mut trips: Vec<(usize, usize, c64)> = Vec::new();
    let omega_d = -spin.delta_rabi;
    for s in 0..2usize {
        let sz = 1.0 - 2.0 * s as f64;
        for m in 0..chain_dim {
            let i = s * chain_dim + m;
            // diagonal: spin bias + site energies
            let mut diag = 0.5 * spin.epsilon_over_hbar * sz;
            for (k, &w) in chain.omega.iter().take(n_sites).enumerate() {
                diag += w * occ(m, k) as f64;
            }
            if diag != 0.0 {
                trips.push((i, i, c64::new(diag, 0.0)));
            }
            // sigma_x drive
            if omega_d != 0.0 {
                trips.push(((1 - s) * chain_dim + m, i, c64::new(0.5 * omega_d, 0.0)));
            }
            // spin-chain coupling: -(t0/2) sz (b0 + b0^dag)
            let n0 = occ(m, 0);
            if n0 + 1 < d_max {
                let amp = -0.5 * chain.t0 * sz * ((n0 + 1) as f64).sqrt();
                let j = s * chain_dim + (m + 1);
                trips.push((j, i, c64::new(amp, 0.0)));
                trips.push((i, j, c64::new(amp, 0.0)));
            }
            // hoppings t_k (b_k^dag b_{k+1} + h.c.)
            for k in 0..n_sites.saturating_sub(1) {
                let (nk, nk1) = (occ(m, k), occ(m, k + 1));
                if nk + 1 < d_max && nk1 > 0 {
                    let amp = chain.hoppings[k] * (((nk + 1) * nk1) as f64).sqrt();
                    let stride = d_max.pow(k as u32);
                    let j = s * chain_dim + m + stride - stride * d_max;
                    trips.push((j, i, c64::new(amp, 0.0)));
                    trips.push((i, j, c64::new(amp, 0.0)));
                }
            }
        }
    }
    let h = Csr::from_triplets(dim, trips);

    let mut psi = vec![ZERO; dim];
    psi[0] = spin0[0];
    psi[chain_dim] = spin0[1];
    let mut out = Vec::with_capacity(times.len());
    let mut t_prev = 0.0;
    for (step, &t) in times.iter().enumerate() {
        let dt = t - t_prev;
        if dt > 0.0 {
            psi = expi_hermitian_action(&h, &psi, dt, 40);
        }
        t_prev = t;
        let p_up: f64 = psi[..chain_dim].iter().map(|z| z.norm_sqr()).sum();
        let p_down: f64 = psi[chain_dim..].iter().map(|z| z.norm_sqr()).sum();
        let norm = p_up + p_down;
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::PropagationFailed {
                step,
                reason: format!("norm drifted to {norm} at t = {t:e}"),
            });
        }
        out.push((t, p_up - p_down));
    }
    Ok(out)
}

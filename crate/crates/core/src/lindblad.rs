//! Spin ⊗ damped-modes master equation: operator assembly and propagation.
//!
//! The Hilbert space is the spin tensored with each mode's truncated Fock
//! space (spin factor first). The generator is
//!
//! ```text
//! ρ̇ = −i[H, ρ] + Σ_k D_k ρ,
//! H/ħ = (δ/2)σz + (Ω_d/2)σx − Σ_k (λ_k/2)(a_k + a_k†)σz + Σ_k ω_k a_k†a_k,
//! D_k ρ = κ(n̄+1)(2 a ρ a† − {a†a, ρ}) + κ n̄ (2 a† ρ a − {a a†, ρ}),
//! ```
//!
//! i.e. collapse operators √(2κ(n̄+1)) a and √(2κ n̄) a† per mode; a mode's
//! population relaxes at rate 2κ. States are propagated by the matrix
//! exponential of the vectorized generator (column stacking).

use std::collections::HashMap;

use faer::c64;

use crate::error::{Error, Result};
use crate::linalg::{
    self, dagger, expm, hermitian_eigenvalues, hermitian_trace_norm, identity, kron, scale, trace,
    unvec_col, vec_col, CMat, Csr, ONE, ZERO,
};

/// Spin half of the model: bias δ = ε/ħ and tunneling Δ. The σx drive
/// strength is Ω_d = −Δ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinParams {
    pub epsilon_over_hbar: f64,
    pub delta_rabi: f64,
}

/// One damped mode: effective frequency, spin coupling, damping rate κ
/// (half the population decay rate), thermal target n̄, Fock truncation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSpec {
    pub omega_m: f64,
    pub lambda: f64,
    pub kappa: f64,
    pub nbar: f64,
    pub n_max: usize,
}

impl ModeSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_max < 1 {
            return Err(Error::InvalidParameter("n_max must be >= 1".into()));
        }
        if !(self.nbar >= 0.0 && self.nbar.is_finite()) {
            return Err(Error::InvalidParameter(format!("nbar = {} must be >= 0", self.nbar)));
        }
        if !(self.kappa >= 0.0 && self.kappa.is_finite()) {
            return Err(Error::InvalidParameter(format!("kappa = {} must be >= 0", self.kappa)));
        }
        if !(self.omega_m.is_finite() && self.lambda.is_finite()) {
            return Err(Error::InvalidParameter("omega_m and lambda must be finite".into()));
        }
        Ok(())
    }
}

/// Default bound on the total Hilbert dimension 2·Π(n_max+1).
pub const DEFAULT_DIM_CAP: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    pub spin: SpinParams,
    pub modes: Vec<ModeSpec>,
    pub dim_cap: usize,
}

impl SystemSpec {
    pub fn new(spin: SpinParams, modes: Vec<ModeSpec>) -> Self {
        Self { spin, modes, dim_cap: DEFAULT_DIM_CAP }
    }

    /// Total Hilbert dimension 2·Π(n_max+1).
    pub fn dim(&self) -> usize {
        2 * self.modes.iter().map(|m| m.n_max + 1).product::<usize>()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.spin.epsilon_over_hbar.is_finite() && self.spin.delta_rabi.is_finite()) {
            return Err(Error::InvalidParameter("spin parameters must be finite".into()));
        }
        for m in &self.modes {
            m.validate()?;
        }
        let dim = self.dim();
        if dim > self.dim_cap {
            return Err(Error::DimensionCap { dim, cap: self.dim_cap });
        }
        Ok(())
    }

    /// Embed a single-mode operator at mode index `k` (identity elsewhere).
    pub fn mode_operator(&self, k: usize, op: &CMat) -> CMat {
        assert!(k < self.modes.len(), "mode index out of range");
        let mut full = identity(2);
        for (i, m) in self.modes.iter().enumerate() {
            let factor = if i == k {
                assert_eq!(op.nrows(), m.n_max + 1, "operator dim vs n_max");
                op.clone()
            } else {
                identity(m.n_max + 1)
            };
            full = kron(&full, &factor);
        }
        full
    }

    /// Embed a 2×2 spin operator (identity on all modes).
    pub fn spin_operator(&self, op: &CMat) -> CMat {
        assert_eq!(op.nrows(), 2);
        let mode_dim = self.dim() / 2;
        kron(op, &identity(mode_dim))
    }
}

pub fn sigma_x() -> CMat {
    CMat::from_fn(2, 2, |i, j| if i != j { ONE } else { ZERO })
}

pub fn sigma_y() -> CMat {
    CMat::from_fn(2, 2, |i, j| match (i, j) {
        (0, 1) => c64::new(0.0, -1.0),
        (1, 0) => c64::new(0.0, 1.0),
        _ => ZERO,
    })
}

pub fn sigma_z() -> CMat {
    CMat::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => ONE,
        (1, 1) => c64::new(-1.0, 0.0),
        _ => ZERO,
    })
}

/// Annihilation operator on an (n_max+1)-dimensional Fock space.
pub fn annihilation(n_max: usize) -> CMat {
    CMat::from_fn(n_max + 1, n_max + 1, |i, j| {
        if j == i + 1 {
            c64::new((j as f64).sqrt(), 0.0)
        } else {
            ZERO
        }
    })
}

/// Number operator a†a.
pub fn number_op(n_max: usize) -> CMat {
    CMat::from_fn(n_max + 1, n_max + 1, |i, j| {
        if i == j {
            c64::new(i as f64, 0.0)
        } else {
            ZERO
        }
    })
}

/// A validated density matrix.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    pub mat: CMat,
}

impl DensityMatrix {
    /// Validates Hermiticity (1e−12), unit trace (1e−10) and numerical
    /// positivity (min eigenvalue ≥ −1e−8).
    pub fn new(mat: CMat) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimMismatch(format!(
                "density matrix must be square, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let herm = linalg::hermiticity_defect(&mat);
        if herm > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "density matrix not Hermitian: defect {herm:e}"
            )));
        }
        let tr = trace(&mat);
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(Error::InvalidParameter(format!(
                "density matrix trace {tr:?} != 1"
            )));
        }
        let min_eig = hermitian_eigenvalues(&mat)[0];
        if min_eig < -1e-8 {
            return Err(Error::InvalidParameter(format!(
                "density matrix not positive: min eigenvalue {min_eig:e}"
            )));
        }
        Ok(Self { mat })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.mat)[0]
    }

    pub fn trace_error(&self) -> f64 {
        (trace(&self.mat) - ONE).norm()
    }
}

/// Trace distance (1/2)‖ρ − σ‖₁.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    0.5 * hermitian_trace_norm(&(&a.mat - &b.mat))
}

/// Thermal (Boltzmann) mode state, renormalized after Fock truncation.
pub fn thermal_state(nbar: f64, n_max: usize) -> DensityMatrix {
    let r = if nbar > 0.0 { nbar / (nbar + 1.0) } else { 0.0 };
    let mut p: Vec<f64> = (0..=n_max).map(|n| r.powi(n as i32)).collect();
    let z: f64 = p.iter().sum();
    for v in &mut p {
        *v /= z;
    }
    let mat = CMat::from_fn(n_max + 1, n_max + 1, |i, j| {
        if i == j {
            c64::new(p[i], 0.0)
        } else {
            ZERO
        }
    });
    DensityMatrix { mat }
}

/// Tensor product ρ_spin ⊗ ρ_mode1 ⊗ ….
pub fn product_state(spin: &CMat, modes: &[&CMat]) -> Result<DensityMatrix> {
    let mut full = spin.clone();
    for m in modes {
        full = kron(&full, m);
    }
    DensityMatrix::new(full)
}

/// H/ħ on the full space (Hermitian, rad/s).
pub fn build_hamiltonian(spec: &SystemSpec) -> Result<CMat> {
    spec.validate()?;
    let delta = spec.spin.epsilon_over_hbar;
    let omega_d = -spec.spin.delta_rabi;
    let mut h = spec.spin_operator(&scale(c64::new(delta / 2.0, 0.0), &sigma_z()))
        + spec.spin_operator(&scale(c64::new(omega_d / 2.0, 0.0), &sigma_x()));
    let sz_full = spec.spin_operator(&sigma_z());
    for (k, m) in spec.modes.iter().enumerate() {
        let a = annihilation(m.n_max);
        let x = &a + &dagger(&a);
        let coupling = &sz_full * &spec.mode_operator(k, &x);
        h += scale(c64::new(-m.lambda / 2.0, 0.0), &coupling);
        h += scale(c64::new(m.omega_m, 0.0), &spec.mode_operator(k, &number_op(m.n_max)));
    }
    Ok(h)
}

/// Collapse operators of mode `k` on the full space:
/// √(2κ(n̄+1)) a and, for n̄ > 0, √(2κn̄) a†.
pub fn collapse_operators(spec: &SystemSpec, k: usize) -> Vec<CMat> {
    let m = &spec.modes[k];
    if m.kappa == 0.0 {
        return Vec::new();
    }
    let a = spec.mode_operator(k, &annihilation(m.n_max));
    let mut ops = vec![scale(c64::new((2.0 * m.kappa * (m.nbar + 1.0)).sqrt(), 0.0), &a)];
    if m.nbar > 0.0 {
        ops.push(scale(c64::new((2.0 * m.kappa * m.nbar).sqrt(), 0.0), &dagger(&a)));
    }
    ops
}

fn sparse_triplets(a: &CMat) -> Vec<(usize, usize, c64)> {
    let mut t = Vec::new();
    for r in 0..a.nrows() {
        for c in 0..a.ncols() {
            if a[(r, c)] != ZERO {
                t.push((r, c, a[(r, c)]));
            }
        }
    }
    t
}

fn kron_triplets(
    a: &[(usize, usize, c64)],
    b: &[(usize, usize, c64)],
    b_dim: usize,
) -> Vec<(usize, usize, c64)> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &(ra, ca, va) in a {
        for &(rb, cb, vb) in b {
            out.push((ra * b_dim + rb, ca * b_dim + cb, va * vb));
        }
    }
    out
}

/// Dissipator superoperator of mode `k` in vectorized (column-stacking)
/// form: Σ_L (L̄ ⊗ L) − ½(I ⊗ L†L) − ½((L†L)ᵀ ⊗ I).
pub fn build_dissipator(spec: &SystemSpec, k: usize) -> Result<Csr> {
    spec.validate()?;
    let dim = spec.dim();
    let mut trips = Vec::new();
    dissipator_triplets(&collapse_operators(spec, k), dim, &mut trips);
    Ok(Csr::from_triplets(dim * dim, trips))
}

fn dissipator_triplets(ops: &[CMat], dim: usize, trips: &mut Vec<(usize, usize, c64)>) {
    let id_t = sparse_triplets(&identity(dim));
    for l in ops {
        let l_t = sparse_triplets(l);
        let l_conj = CMat::from_fn(dim, dim, |i, j| l[(i, j)].conj());
        let ldl = &dagger(l) * l;
        let half_ldl = scale(c64::new(-0.5, 0.0), &ldl);
        let half_ldl_t_trans =
            sparse_triplets(&CMat::from_fn(dim, dim, |i, j| half_ldl[(j, i)]));
        trips.extend(kron_triplets(&sparse_triplets(&l_conj), &l_t, dim));
        trips.extend(kron_triplets(&id_t, &sparse_triplets(&half_ldl), dim));
        trips.extend(kron_triplets(&half_ldl_t_trans, &id_t, dim));
    }
}

/// Apply a vectorized superoperator to a matrix.
pub fn apply_super(s: &Csr, rho: &CMat) -> CMat {
    let n = rho.nrows();
    let v = vec_col(rho);
    let mut out = vec![ZERO; n * n];
    s.matvec(&v, &mut out);
    unvec_col(&out, n)
}

/// Vectorized generator of the full master equation, stored sparse.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    pub dim: usize,
    pub op: Csr,
}

impl Liouvillian {
    /// Assemble −i(I⊗H − Hᵀ⊗I) plus the dissipators of every collapse
    /// operator.
    pub fn build(h: &CMat, collapse: &[CMat]) -> Self {
        let dim = h.nrows();
        let minus_i = c64::new(0.0, -1.0);
        let id_t = sparse_triplets(&identity(dim));
        let h_t = sparse_triplets(&scale(minus_i, h));
        let h_trans_t = sparse_triplets(&CMat::from_fn(dim, dim, |i, j| -minus_i * h[(j, i)]));
        let mut trips = kron_triplets(&id_t, &h_t, dim);
        trips.extend(kron_triplets(&h_trans_t, &id_t, dim));
        dissipator_triplets(collapse, dim, &mut trips);
        Self { dim, op: Csr::from_triplets(dim * dim, trips) }
    }

    pub fn from_spec(spec: &SystemSpec) -> Result<Self> {
        let h = build_hamiltonian(spec)?;
        let mut collapse = Vec::new();
        for k in 0..spec.modes.len() {
            collapse.extend(collapse_operators(spec, k));
        }
        Ok(Self::build(&h, &collapse))
    }

    /// Max over columns of |Σ_i L[(i,i), col]|: the adjoint generator applied
    /// to the identity, which vanishes for any trace-preserving generator.
    pub fn trace_preservation_defect(&self) -> f64 {
        let n2 = self.dim * self.dim;
        let mut col_sum = vec![ZERO; n2];
        for i in 0..self.dim {
            let r = i * self.dim + i;
            for k in self.op.row_ptr[r]..self.op.row_ptr[r + 1] {
                col_sum[self.op.col[k]] += self.op.val[k];
            }
        }
        col_sum.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Evolve `rho0` under the system's master equation, reporting the state at
/// each requested time. Times must be non-negative and ascending; the
/// propagator for each distinct step size is exponentiated once and reused.
pub fn evolve(spec: &SystemSpec, rho0: &DensityMatrix, times: &[f64]) -> Result<Vec<DensityMatrix>> {
    spec.validate()?;
    let dim = spec.dim();
    if rho0.dim() != dim {
        return Err(Error::DimMismatch(format!(
            "initial state dim {} vs system dim {dim}",
            rho0.dim()
        )));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) || times.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::InvalidParameter(
            "time grid must be non-negative and strictly ascending".into(),
        ));
    }
    let liou = Liouvillian::from_spec(spec)?;
    let ldense = liou.op.to_dense();

    let mut props: HashMap<u64, CMat> = HashMap::new();
    let mut state = CMat::from_fn(dim * dim, 1, |i, _| vec_col(&rho0.mat)[i]);
    let mut out = Vec::with_capacity(times.len());
    let mut t_prev = 0.0;
    for (step, &t) in times.iter().enumerate() {
        let dt = t - t_prev;
        if dt > 0.0 {
            let prop = props
                .entry(dt.to_bits())
                .or_insert_with(|| expm(&scale(c64::new(dt, 0.0), &ldense)));
            state = &*prop * &state;
        }
        t_prev = t;
        let v: Vec<c64> = (0..dim * dim).map(|i| state[(i, 0)]).collect();
        let rho = DensityMatrix::new(unvec_col(&v, dim)).map_err(|e| Error::PropagationFailed {
            step,
            reason: format!("state invariant violated at t = {t:e}: {e}"),
        })?;
        out.push(rho);
    }
    Ok(out)
}

/// trace(Oρ) for a Hermitian observable; errors if a corrupted state leaves
/// a non-negligible imaginary residue.
pub fn expect(observable: &CMat, rho: &DensityMatrix) -> Result<f64> {
    if observable.nrows() != rho.dim() {
        return Err(Error::DimMismatch(format!(
            "observable dim {} vs state dim {}",
            observable.nrows(),
            rho.dim()
        )));
    }
    let tr = trace(&(observable * &rho.mat));
    if tr.im.abs() >= 1e-8 {
        return Err(Error::NonRealExpectation { imag: tr.im });
    }
    Ok(tr.re)
}

/// ⟨σ_z(t)⟩ on the given grid.
pub fn sigma_z_trajectory(
    spec: &SystemSpec,
    rho0: &DensityMatrix,
    times: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let sz = spec.spin_operator(&sigma_z());
    let states = evolve(spec, rho0, times)?;
    times
        .iter()
        .zip(&states)
        .map(|(&t, rho)| Ok((t, expect(&sz, rho)?)))
        .collect()
}

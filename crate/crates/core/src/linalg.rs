//! Dense and sparse complex linear algebra used by the simulation engines.
//!
//! Dense storage is `faer::Mat<c64>`; this module adds the pieces faer does
//! not ship: Kronecker products, the Padé-13 scaling-and-squaring matrix
//! exponential, a minimal CSR matrix, and a Lanczos propagator for Hermitian
//! operators.

use faer::c64;
use faer::linalg::solvers::{DenseSolveCore, Solve};
use faer::Mat;

pub type CMat = Mat<c64>;

pub const ZERO: c64 = c64 { re: 0.0, im: 0.0 };
pub const ONE: c64 = c64 { re: 1.0, im: 0.0 };

pub fn identity(n: usize) -> CMat {
    Mat::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
}

pub fn zeros(m: usize, n: usize) -> CMat {
    Mat::zeros(m, n)
}

pub fn scale(z: c64, a: &CMat) -> CMat {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| z * a[(i, j)])
}

pub fn dagger(a: &CMat) -> CMat {
    Mat::from_fn(a.ncols(), a.nrows(), |i, j| a[(j, i)].conj())
}

/// Kronecker product a ⊗ b.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ar, ac) = (a.nrows(), a.ncols());
    let (br, bc) = (b.nrows(), b.ncols());
    Mat::from_fn(ar * br, ac * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

pub fn trace(a: &CMat) -> c64 {
    (0..a.nrows().min(a.ncols())).map(|i| a[(i, i)]).sum()
}

/// Largest absolute entry.
pub fn max_abs(a: &CMat) -> f64 {
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max(a[(i, j)].norm());
        }
    }
    m
}

/// Induced 1-norm (max column abs sum).
pub fn norm_1(a: &CMat) -> f64 {
    let mut best = 0.0f64;
    for j in 0..a.ncols() {
        let s: f64 = (0..a.nrows()).map(|i| a[(i, j)].norm()).sum();
        best = best.max(s);
    }
    best
}

/// ‖a − a†‖_max, the Hermiticity defect.
pub fn hermiticity_defect(a: &CMat) -> f64 {
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    m
}

/// Eigenvalues of a Hermitian matrix, ascending. The input is Hermitized
/// first so tiny numerical asymmetry cannot poison the solve.
pub fn hermitian_eigenvalues(a: &CMat) -> Vec<f64> {
    let n = a.nrows();
    let h = Mat::from_fn(n, n, |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5);
    let evd = h
        .self_adjoint_eigen(faer::Side::Lower)
        .expect("hermitian eigensolve");
    let mut out: Vec<f64> = (0..n).map(|i| evd.S()[i].re).collect();
    out.sort_by(f64::total_cmp);
    out
}

/// Trace norm ‖a‖₁ = Σ|eig| of a Hermitian matrix.
pub fn hermitian_trace_norm(a: &CMat) -> f64 {
    hermitian_eigenvalues(a).iter().map(|e| e.abs()).sum()
}

/// Matrix inverse together with its 1-norm condition number. A singular
/// input yields non-finite inverse entries; the condition number is then
/// reported as infinite (f64::max in the norm would otherwise drop NaNs).
pub fn inverse_with_cond(a: &CMat) -> (CMat, f64) {
    let lu = a.partial_piv_lu();
    let inv = lu.inverse();
    let finite = (0..inv.ncols())
        .all(|j| (0..inv.nrows()).all(|i| inv[(i, j)].re.is_finite() && inv[(i, j)].im.is_finite()));
    let cond = if finite {
        norm_1(a) * norm_1(&inv)
    } else {
        f64::INFINITY
    };
    (inv, cond)
}

/// Matrix exponential by Padé-13 approximation with scaling and squaring.
pub fn expm(a: &CMat) -> CMat {
    const THETA13: f64 = 5.371920351148152;
    const B: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm requires a square matrix");
    let eta = norm_1(a);
    let s = if eta > THETA13 {
        (eta / THETA13).log2().ceil() as u32
    } else {
        0
    };
    let m = scale(c64::new(1.0 / (1u64 << s.min(63)) as f64, 0.0), a);
    // for s > 63 halve repeatedly (never hit in practice)
    let m = {
        let mut m = m;
        for _ in 63..s {
            m = scale(c64::new(0.5, 0.0), &m);
        }
        m
    };

    let id = identity(n);
    let m2 = &m * &m;
    let m4 = &m2 * &m2;
    let m6 = &m2 * &m4;

    let w1 = scale(c64::new(B[13], 0.0), &m6)
        + scale(c64::new(B[11], 0.0), &m4)
        + scale(c64::new(B[9], 0.0), &m2);
    let w2 = &m6 * &w1
        + scale(c64::new(B[7], 0.0), &m6)
        + scale(c64::new(B[5], 0.0), &m4)
        + scale(c64::new(B[3], 0.0), &m2)
        + scale(c64::new(B[1], 0.0), &id);
    let u = &m * &w2;
    let z1 = scale(c64::new(B[12], 0.0), &m6)
        + scale(c64::new(B[10], 0.0), &m4)
        + scale(c64::new(B[8], 0.0), &m2);
    let v = &m6 * &z1
        + scale(c64::new(B[6], 0.0), &m6)
        + scale(c64::new(B[4], 0.0), &m4)
        + scale(c64::new(B[2], 0.0), &m2)
        + scale(c64::new(B[0], 0.0), &id);

    let denom = &v - &u;
    let numer = &v + &u;
    let mut f = denom.partial_piv_lu().solve(&numer);
    for _ in 0..s {
        f = &f * &f;
    }
    f
}

/// Column-stacking vectorization: vec(ρ)[c·n + r] = ρ[r, c].
pub fn vec_col(rho: &CMat) -> Vec<c64> {
    let n = rho.nrows();
    let mut v = Vec::with_capacity(n * rho.ncols());
    for c in 0..rho.ncols() {
        for r in 0..n {
            v.push(rho[(r, c)]);
        }
    }
    v
}

/// Inverse of [`vec_col`] for a square matrix of dimension `n`.
pub fn unvec_col(v: &[c64], n: usize) -> CMat {
    assert_eq!(v.len(), n * n);
    Mat::from_fn(n, n, |r, c| v[c * n + r])
}

/// Minimal compressed-sparse-row matrix.
#[derive(Debug, Clone)]
pub struct Csr {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col: Vec<usize>,
    pub val: Vec<c64>,
}

impl Csr {
    /// Assemble from (row, col, value) triplets; duplicates are summed and
    /// exact zeros dropped.
    pub fn from_triplets(n: usize, mut trips: Vec<(usize, usize, c64)>) -> Self {
        trips.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut merged: Vec<(usize, usize, c64)> = Vec::with_capacity(trips.len());
        for (r, c, v) in trips {
            match merged.last_mut() {
                Some((lr, lc, lv)) if *lr == r && *lc == c => *lv += v,
                _ => merged.push((r, c, v)),
            }
        }
        let mut row_ptr = vec![0usize; n + 1];
        let mut col = Vec::with_capacity(merged.len());
        let mut val = Vec::with_capacity(merged.len());
        let mut row = 0usize;
        for (r, c, v) in merged {
            if v == ZERO {
                continue;
            }
            while row < r {
                row += 1;
                row_ptr[row] = col.len();
            }
            col.push(c);
            val.push(v);
        }
        while row < n {
            row += 1;
            row_ptr[row] = col.len();
        }
        Csr { n, row_ptr, col, val }
    }

    pub fn nnz(&self) -> usize {
        self.val.len()
    }

    pub fn matvec(&self, x: &[c64], y: &mut [c64]) {
        for r in 0..self.n {
            let mut acc = ZERO;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.val[k] * x[self.col[k]];
            }
            y[r] = acc;
        }
    }

    pub fn to_dense(&self) -> CMat {
        let mut m = zeros(self.n, self.n);
        for r in 0..self.n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                m[(r, self.col[k])] += self.val[k];
            }
        }
        m
    }

    /// Gershgorin bound on the spectral radius.
    pub fn norm_bound(&self) -> f64 {
        (0..self.n)
            .map(|r| {
                (self.row_ptr[r]..self.row_ptr[r + 1])
                    .map(|k| self.val[k].norm())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }
}

fn dot(a: &[c64], b: &[c64]) -> c64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn nrm2(a: &[c64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Apply exp(-i t H) to `psi` for Hermitian `h` by Lanczos propagation with
/// full reorthogonalization. Substeps are chosen so the Krylov space easily
/// covers the step (‖H‖·dt ≲ 12 with a 40-dimensional space).
pub fn expi_hermitian_action(h: &Csr, psi: &[c64], t: f64, krylov_dim: usize) -> Vec<c64> {
    let n = h.n;
    let hnorm = h.norm_bound().max(1e-300);
    let n_sub = ((hnorm * t.abs() / 12.0).ceil() as usize).max(1);
    let dt = t / n_sub as f64;
    let m_max = krylov_dim.min(n);

    let mut state = psi.to_vec();
    let mut w = vec![ZERO; n];
    for _ in 0..n_sub {
        let beta0 = nrm2(&state);
        if beta0 == 0.0 {
            return state;
        }
        let mut basis: Vec<Vec<c64>> = Vec::with_capacity(m_max);
        basis.push(state.iter().map(|x| x / beta0).collect());
        let mut alpha = Vec::new();
        let mut beta = Vec::new();
        for j in 0..m_max {
            h.matvec(&basis[j], &mut w);
            let a_j = dot(&basis[j], &w).re;
            alpha.push(a_j);
            for (wi, qi) in w.iter_mut().zip(&basis[j]) {
                *wi -= c64::new(a_j, 0.0) * qi;
            }
            if j > 0 {
                let b_prev = beta[j - 1];
                for (wi, qi) in w.iter_mut().zip(&basis[j - 1]) {
                    *wi -= c64::new(b_prev, 0.0) * qi;
                }
            }
            // full reorthogonalization
            for q in &basis {
                let c = dot(q, &w);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= c * qi;
                }
            }
            let b_j = nrm2(&w);
            if b_j < 1e-14 * hnorm || j + 1 == m_max {
                break;
            }
            beta.push(b_j);
            basis.push(w.iter().map(|x| x / b_j).collect());
        }
        let m = basis.len();
        // exp(-i dt T) e1 via dense Hermitian eigensolve of the tridiagonal
        let tmat = Mat::<c64>::from_fn(m, m, |i, j| {
            if i == j {
                c64::new(alpha[i], 0.0)
            } else if j == i + 1 || i == j + 1 {
                c64::new(beta[i.min(j)], 0.0)
            } else {
                ZERO
            }
        });
        let evd = tmat
            .self_adjoint_eigen(faer::Side::Lower)
            .expect("tridiagonal eigensolve");
        let q = evd.U();
        let evs = evd.S();
        // y = Q exp(-i dt Λ) Q† e1 * beta0
        let mut y = vec![ZERO; m];
        for k in 0..m {
            let phase = c64::from_polar(1.0, -dt * evs[k].re);
            let coef = q[(0, k)].conj() * phase * beta0;
            for (i, yi) in y.iter_mut().enumerate() {
                *yi += q[(i, k)] * coef;
            }
        }
        for s in state.iter_mut() {
            *s = ZERO;
        }
        for (j, qv) in basis.iter().enumerate() {
            for (si, qi) in state.iter_mut().zip(qv) {
                *si += y[j] * qi;
            }
        }
    }
    state
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kron_and_dagger() {
        let sx = Mat::from_fn(2, 2, |i, j| if i != j { ONE } else { ZERO });
        let id = identity(2);
        let k = kron(&sx, &id);
        assert_eq!(k.nrows(), 4);
        assert_eq!(k[(0, 2)], ONE);
        assert_eq!(k[(1, 3)], ONE);
        assert_eq!(k[(0, 1)], ZERO);
        let d = dagger(&k);
        assert!(hermiticity_defect(&d) < 1e-15);
    }

    #[test]
    fn expm_diagonal() {
        let a = Mat::from_fn(3, 3, |i, j| {
            if i == j {
                c64::new(-(i as f64 + 1.0), 0.5)
            } else {
                ZERO
            }
        });
        let e = expm(&a);
        for i in 0..3 {
            let expect = c64::new(-(i as f64 + 1.0), 0.5).exp();
            assert!((e[(i, i)] - expect).norm() < 1e-13);
        }
    }

    #[test]
    fn expm_rotation() {
        // exp(i θ σy-like real rotation generator)
        let th = 0.7;
        let a = Mat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => c64::new(-th, 0.0),
            (1, 0) => c64::new(th, 0.0),
            _ => ZERO,
        });
        let e = expm(&a);
        assert!((e[(0, 0)].re - th.cos()).abs() < 1e-14);
        assert!((e[(1, 0)].re - th.sin()).abs() < 1e-14);
    }

    #[test]
    fn expm_large_norm_scaling() {
        // norm big enough to force several squarings
        let a = Mat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => c64::new(-40.0, 0.0),
            (1, 0) => c64::new(40.0, 0.0),
            _ => ZERO,
        });
        let e = expm(&a);
        assert!((e[(0, 0)].re - 40.0f64.cos()).abs() < 1e-10);
    }

    #[test]
    fn csr_matches_dense() {
        let trips = vec![
            (0, 0, c64::new(1.0, 0.0)),
            (0, 2, c64::new(0.0, 2.0)),
            (0, 2, c64::new(1.0, 0.0)),
            (2, 1, c64::new(-1.0, 0.0)),
        ];
        let m = Csr::from_triplets(3, trips);
        assert_eq!(m.nnz(), 3);
        let x = vec![ONE, c64::new(2.0, 0.0), c64::new(0.0, 1.0)];
        let mut y = vec![ZERO; 3];
        m.matvec(&x, &mut y);
        let d = m.to_dense();
        for r in 0..3 {
            let mut acc = ZERO;
            for c in 0..3 {
                acc += d[(r, c)] * x[c];
            }
            assert!((acc - y[r]).norm() < 1e-15);
        }
        assert!((d[(0, 2)] - c64::new(1.0, 2.0)).norm() < 1e-15);
    }

    #[test]
    fn lanczos_matches_expm() {
        // small Hermitian matrix, compare against dense exponential
        let n = 6;
        let mut trips = Vec::new();
        for i in 0..n {
            trips.push((i, i, c64::new(i as f64, 0.0)));
            if i + 1 < n {
                trips.push((i, i + 1, c64::new(0.3, 0.1)));
                trips.push((i + 1, i, c64::new(0.3, -0.1)));
            }
        }
        let h = Csr::from_triplets(n, trips);
        let t = 2.3;
        let psi: Vec<c64> = (0..n).map(|i| c64::new(1.0 / (1.0 + i as f64), 0.2)).collect();
        let got = expi_hermitian_action(&h, &psi, t, 40);

        let hd = h.to_dense();
        let gen = scale(c64::new(0.0, -t), &hd);
        let u = expm(&gen);
        for r in 0..n {
            let mut acc = ZERO;
            for c in 0..n {
                acc += u[(r, c)] * psi[c];
            }
            assert!((acc - got[r]).norm() < 1e-10, "row {r}");
        }
    }

    #[test]
    fn hermitian_eigs_known() {
        // σx eigenvalues ±1
        let sx = Mat::from_fn(2, 2, |i, j| if i != j { ONE } else { ZERO });
        let e = hermitian_eigenvalues(&sx);
        assert!((e[0] + 1.0).abs() < 1e-14 && (e[1] - 1.0).abs() < 1e-14);
        assert!((hermitian_trace_norm(&sx) - 2.0).abs() < 1e-14);
    }
}

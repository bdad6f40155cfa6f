//! Damped least-squares (Levenberg–Marquardt) minimizer with a
//! finite-difference Jacobian.

use faer::linalg::solvers::Solve;
use faer::Mat;

#[derive(Debug, Clone, Copy)]
pub struct LmConfig {
    pub max_iter: usize,
    /// Relative cost-decrease convergence threshold.
    pub ftol: f64,
    /// Step-size convergence threshold (relative).
    pub xtol: f64,
    /// Relative finite-difference step.
    pub fd_step: f64,
}

impl Default for LmConfig {
    fn default() -> Self {
        Self {
            max_iter: 200,
            ftol: 1e-14,
            xtol: 1e-12,
            fd_step: 1e-7,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LmResult {
    pub params: Vec<f64>,
    /// Final sum of squared residuals.
    pub cost: f64,
    /// Accepted cost after each successful iteration (monotone non-increasing).
    pub history: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

fn cost_of(r: &[f64]) -> f64 {
    r.iter().map(|x| x * x).sum()
}

/// Minimize Σ rᵢ(p)² over p. `residuals` writes the residual vector for the
/// given parameters into its output slice.
pub fn levenberg_marquardt<F>(residuals: F, n_res: usize, p0: &[f64], cfg: &LmConfig) -> LmResult
where
    F: Fn(&[f64], &mut [f64]),
{
    let n_par = p0.len();
    let mut p = p0.to_vec();
    let mut r = vec![0.0; n_res];
    residuals(&p, &mut r);
    let mut cost = cost_of(&r);
    let mut history = vec![cost];
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;

    let mut r_fwd = vec![0.0; n_res];
    let mut r_bwd = vec![0.0; n_res];

    for it in 0..cfg.max_iter {
        iterations = it + 1;
        // central-difference Jacobian
        let mut jac = Mat::<f64>::zeros(n_res, n_par);
        for j in 0..n_par {
            let h = cfg.fd_step * p[j].abs().max(1e-4);
            let mut pp = p.clone();
            pp[j] += h;
            residuals(&pp, &mut r_fwd);
            pp[j] = p[j] - h;
            residuals(&pp, &mut r_bwd);
            for i in 0..n_res {
                jac[(i, j)] = (r_fwd[i] - r_bwd[i]) / (2.0 * h);
            }
        }
        // normal equations with Marquardt damping
        let mut jtj = Mat::<f64>::zeros(n_par, n_par);
        let mut jtr = Mat::<f64>::zeros(n_par, 1);
        for a in 0..n_par {
            for b in 0..n_par {
                let mut s = 0.0;
                for i in 0..n_res {
                    s += jac[(i, a)] * jac[(i, b)];
                }
                jtj[(a, b)] = s;
            }
            let mut s = 0.0;
            for i in 0..n_res {
                s += jac[(i, a)] * r[i];
            }
            jtr[(a, 0)] = -s;
        }
        if (0..n_par).map(|a| jtr[(a, 0)].abs()).fold(0.0, f64::max) < 1e-300 {
            converged = true;
            break;
        }

        let mut accepted = false;
        for _ in 0..30 {
            let mut a = jtj.clone();
            for d in 0..n_par {
                a[(d, d)] += lambda * jtj[(d, d)].max(1e-30);
            }
            let step = a.partial_piv_lu().solve(&jtr);
            let p_try: Vec<f64> = (0..n_par).map(|j| p[j] + step[(j, 0)]).collect();
            let mut r_try = vec![0.0; n_res];
            residuals(&p_try, &mut r_try);
            let cost_try = cost_of(&r_try);
            if cost_try < cost {
                let step_rel = (0..n_par)
                    .map(|j| step[(j, 0)].abs() / p[j].abs().max(1.0))
                    .fold(0.0, f64::max);
                let decrease = (cost - cost_try) / cost.max(1e-300);
                p = p_try;
                r = r_try;
                cost = cost_try;
                history.push(cost);
                lambda = (lambda * 0.3).max(1e-12);
                accepted = true;
                if decrease < cfg.ftol || step_rel < cfg.xtol || cost == 0.0 {
                    converged = true;
                }
                break;
            }
            lambda *= 10.0;
            if lambda > 1e12 {
                break;
            }
        }
        if !accepted {
            // no downhill step found within the damping budget
            converged = true;
        }
        if converged {
            break;
        }
    }

    LmResult {
        params: p,
        cost,
        history,
        converged,
        iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fits_exponential_decay() {
        // y = 3 e^{-0.7 x}, recover (3, 0.7)
        let xs: Vec<f64> = (0..40).map(|i| i as f64 * 0.1).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * (-0.7 * x).exp()).collect();
        let res = |p: &[f64], out: &mut [f64]| {
            for (i, (x, y)) in xs.iter().zip(&ys).enumerate() {
                out[i] = p[0] * (-p[1] * x).exp() - y;
            }
        };
        let fit = levenberg_marquardt(res, xs.len(), &[1.0, 0.2], &LmConfig::default());
        assert!(fit.converged);
        assert!((fit.params[0] - 3.0).abs() < 1e-8, "{:?}", fit.params);
        assert!((fit.params[1] - 0.7).abs() < 1e-8);
    }

    #[test]
    fn history_is_monotone() {
        let res = |p: &[f64], out: &mut [f64]| {
            out[0] = p[0] * p[0] - 2.0;
            out[1] = p[0] - p[1];
        };
        let fit = levenberg_marquardt(res, 2, &[5.0, -3.0], &LmConfig::default());
        for w in fit.history.windows(2) {
            assert!(w[1] <= w[0] + 1e-15);
        }
        assert!((fit.params[0] - 2.0f64.sqrt()).abs() < 1e-7);
    }

    #[test]
    fn already_at_minimum() {
        let res = |p: &[f64], out: &mut [f64]| {
            out[0] = p[0] - 1.0;
        };
        let fit = levenberg_marquardt(res, 1, &[1.0], &LmConfig::default());
        assert!(fit.converged);
        assert!(fit.cost < 1e-28);
    }
}

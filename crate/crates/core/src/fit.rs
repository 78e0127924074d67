//! Damped iterative least squares (Levenberg-Marquardt) for the small curve
//! fits in this crate: Lorentzian resonances and double-Gaussian ODMR dips.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FitError {
    #[error("fit did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("degenerate fit problem: {0}")]
    Degenerate(String),
}

#[derive(Debug, Clone)]
pub struct FitOptions {
    pub max_iterations: usize,
    /// Relative cost-decrease threshold.
    pub ftol: f64,
    /// Relative parameter-step threshold.
    pub xtol: f64,
    /// Initial damping, relative to max diag(J^T J).
    pub initial_damping: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { max_iterations: 200, ftol: 1e-14, xtol: 1e-13, initial_damping: 1e-3 }
    }
}

#[derive(Debug, Clone)]
pub struct FitOutcome {
    pub params: Vec<f64>,
    /// Parameter covariance, sigma^2 (J^T J)^-1, row-major p x p.
    pub covariance: Vec<f64>,
    /// Sum of squared residuals at the solution.
    pub cost: f64,
    pub iterations: usize,
}

/// Minimize the sum of squares of `residuals(params)`.
///
/// `residuals` fills a caller-sized buffer; the Jacobian is formed by
/// central finite differences.
pub fn levenberg_marquardt<F>(
    mut residuals: F,
    init: &[f64],
    n_residuals: usize,
    opts: &FitOptions,
) -> Result<FitOutcome, FitError>
where
    F: FnMut(&[f64], &mut [f64]),
{
    let n_params = init.len();
    if n_residuals < n_params {
        return Err(FitError::Degenerate(format!(
            "{n_residuals} residuals for {n_params} parameters"
        )));
    }
    let mut params = init.to_vec();
    let mut r = vec![0.0; n_residuals];
    residuals(&params, &mut r);
    let mut cost: f64 = r.iter().map(|v| v * v).sum();
    if !cost.is_finite() {
        return Err(FitError::Degenerate("non-finite residuals at initial point".into()));
    }

    let mut jac = DMatrix::<f64>::zeros(n_residuals, n_params);
    let mut r_plus = vec![0.0; n_residuals];
    let mut r_minus = vec![0.0; n_residuals];
    let mut damping: Option<f64> = None;
    let mut iterations = 0;

    for _ in 0..opts.max_iterations {
        iterations += 1;
        // Central-difference Jacobian.
        for p in 0..n_params {
            let h = (1e-7 * params[p].abs()).max(1e-9);
            let saved = params[p];
            params[p] = saved + h;
            residuals(&params, &mut r_plus);
            params[p] = saved - h;
            residuals(&params, &mut r_minus);
            params[p] = saved;
            let inv = 1.0 / (2.0 * h);
            for i in 0..n_residuals {
                jac[(i, p)] = (r_plus[i] - r_minus[i]) * inv;
            }
        }
        let jt = jac.transpose();
        let jtj = &jt * &jac;
        let g = &jt * DVector::from_column_slice(&r);

        let max_diag = (0..n_params).map(|i| jtj[(i, i)]).fold(0.0f64, f64::max);
        if max_diag <= 0.0 {
            break; // flat residual surface; nothing to do
        }
        let lambda = damping.get_or_insert(opts.initial_damping * max_diag);

        let mut improved = false;
        for _ in 0..16 {
            let mut a = jtj.clone();
            for i in 0..n_params {
                a[(i, i)] += *lambda;
            }
            let step = match a.cholesky() {
                Some(ch) => ch.solve(&g),
                None => {
                    *lambda *= 10.0;
                    continue;
                }
            };
            let trial: Vec<f64> =
                params.iter().zip(step.iter()).map(|(p, s)| p - s).collect();
            residuals(&trial, &mut r_plus);
            let trial_cost: f64 = r_plus.iter().map(|v| v * v).sum();
            if trial_cost.is_finite() && trial_cost <= cost {
                let cost_drop = cost - trial_cost;
                let max_rel_step = params
                    .iter()
                    .zip(step.iter())
                    .map(|(p, s)| s.abs() / (p.abs() + 1e-300))
                    .fold(0.0f64, f64::max);
                params = trial;
                std::mem::swap(&mut r, &mut r_plus);
                cost = trial_cost;
                *lambda = (*lambda / 3.0).max(1e-300);
                improved = true;
                if cost_drop <= opts.ftol * cost.max(1e-300) || max_rel_step <= opts.xtol {
                    return finish(residuals, params, r, cost, iterations, n_params);
                }
                break;
            }
            *lambda *= 4.0;
        }
        if !improved {
            // Damping exhausted: no step of any length improves the cost, so
            // the current point is the minimum to line-search precision.
            return finish(residuals, params, r, cost, iterations, n_params);
        }
    }
    Err(FitError::NoConvergence { iterations })
}

fn finish<F>(
    mut residuals: F,
    params: Vec<f64>,
    r: Vec<f64>,
    cost: f64,
    iterations: usize,
    n_params: usize,
) -> Result<FitOutcome, FitError>
where
    F: FnMut(&[f64], &mut [f64]),
{
    // Covariance from the final Jacobian.
    let n_residuals = r.len();
    let mut jac = DMatrix::<f64>::zeros(n_residuals, n_params);
    let mut r_plus = vec![0.0; n_residuals];
    let mut r_minus = vec![0.0; n_residuals];
    let mut p = params.clone();
    for c in 0..n_params {
        let h = (1e-7 * p[c].abs()).max(1e-9);
        let saved = p[c];
        p[c] = saved + h;
        residuals(&p, &mut r_plus);
        p[c] = saved - h;
        residuals(&p, &mut r_minus);
        p[c] = saved;
        let inv = 1.0 / (2.0 * h);
        for i in 0..n_residuals {
            jac[(i, c)] = (r_plus[i] - r_minus[i]) * inv;
        }
    }
    let jtj = jac.transpose() * &jac;
    let dof = (n_residuals - n_params).max(1) as f64;
    let sigma2 = cost / dof;
    let covariance = match jtj.try_inverse() {
        Some(inv) => {
            let mut cov = vec![0.0; n_params * n_params];
            for i in 0..n_params {
                for j in 0..n_params {
                    cov[i * n_params + j] = sigma2 * inv[(i, j)];
                }
            }
            cov
        }
        None => vec![f64::NAN; n_params * n_params],
    };
    Ok(FitOutcome { params, covariance, cost, iterations })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exponential_parameters() {
        // y = a * exp(-b x); fit from noiseless samples.
        let xs: Vec<f64> = (0..50).map(|i| i as f64 * 0.1).collect();
        let truth = [2.5, 0.7];
        let ys: Vec<f64> = xs.iter().map(|x| truth[0] * (-truth[1] * x).exp()).collect();
        let out = levenberg_marquardt(
            |p, r| {
                for (i, x) in xs.iter().enumerate() {
                    r[i] = p[0] * (-p[1] * x).exp() - ys[i];
                }
            },
            &[1.0, 1.0],
            xs.len(),
            &FitOptions::default(),
        )
        .unwrap();
        assert!((out.params[0] - truth[0]).abs() < 1e-8, "{:?}", out.params);
        assert!((out.params[1] - truth[1]).abs() < 1e-8, "{:?}", out.params);
    }

    #[test]
    fn linear_problem_converges_in_few_steps() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x - 1.0).collect();
        let out = levenberg_marquardt(
            |p, r| {
                for (i, x) in xs.iter().enumerate() {
                    r[i] = p[0] * x + p[1] - ys[i];
                }
            },
            &[0.0, 0.0],
            xs.len(),
            &FitOptions::default(),
        )
        .unwrap();
        assert!((out.params[0] - 3.0).abs() < 1e-10);
        assert!((out.params[1] + 1.0).abs() < 1e-10);
    }

    #[test]
    fn iteration_cap_reports_no_convergence() {
        let opts = FitOptions { max_iterations: 2, ..Default::default() };
        // Rosenbrock-style residuals from a bad start need > 2 iterations.
        let err = levenberg_marquardt(
            |p, r| {
                r[0] = 10.0 * (p[1] - p[0] * p[0]);
                r[1] = 1.0 - p[0];
            },
            &[-12.0, 10.0],
            2,
            &opts,
        )
        .unwrap_err();
        assert!(matches!(err, FitError::NoConvergence { .. }));
    }

    #[test]
    fn covariance_scales_with_residual_noise() {
        // A constant-model fit: covariance of the mean is sigma^2 / n.
        let ys = [1.0, 2.0, 3.0, 4.0, 5.0];
        let out = levenberg_marquardt(
            |p, r| {
                for (i, y) in ys.iter().enumerate() {
                    r[i] = p[0] - y;
                }
            },
            &[0.0],
            ys.len(),
            &FitOptions::default(),
        )
        .unwrap();
        assert!((out.params[0] - 3.0).abs() < 1e-10);
        let var = ys.iter().map(|y| (y - 3.0f64).powi(2)).sum::<f64>() / 4.0; // sigma^2
        assert!((out.covariance[0] - var / 5.0).abs() / (var / 5.0) < 1e-6);
    }
}

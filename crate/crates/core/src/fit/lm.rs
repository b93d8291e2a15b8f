//! Damped least squares (Levenberg–Marquardt) with numerical Jacobians.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Result, TwpaError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LmOptions {
    pub max_iterations: usize,
    /// Relative cost decrease below which an accepted step counts as converged.
    pub ftol: f64,
    /// Relative parameter step below which an accepted step counts as converged.
    pub xtol: f64,
    /// Largest cosine between the residual and any Jacobian column at a minimum.
    pub gtol: f64,
    /// Central-difference step relative to `max(|x|, 1)`.
    pub jacobian_step: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            ftol: 1e-15,
            xtol: 1e-12,
            gtol: 1e-10,
            jacobian_step: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub parameters: Vec<f64>,
    /// 1σ from `s² (JᵀJ)⁻¹` at the optimum.
    pub uncertainties: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
    pub residual_norm: f64,
    pub residuals: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

impl FitResult {
    pub fn cost(&self) -> f64 {
        0.5 * self.residual_norm * self.residual_norm
    }
}

fn jacobian<F>(f: &F, x: &[f64], step: f64, m: usize) -> Result<DMatrix<f64>>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let n = x.len();
    let mut jac = DMatrix::zeros(m, n);
    let mut xp = x.to_vec();
    for j in 0..n {
        let h = step * x[j].abs().max(1.0);
        xp[j] = x[j] + h;
        let fp = f(&xp);
        xp[j] = x[j] - h;
        let fm = f(&xp);
        xp[j] = x[j];
        if fp.len() != m || fm.len() != m {
            return Err(TwpaError::Fit("residual length changed between evaluations".into()));
        }
        for i in 0..m {
            jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    if jac.iter().any(|v| !v.is_finite()) {
        return Err(TwpaError::Fit("non-finite Jacobian".into()));
    }
    Ok(jac)
}

fn sum_sq(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum()
}

/// Minimizes `½|f(x)|²` from `x0`.
///
/// `converged` is only set when a stopping test other than the iteration
/// limit fires.
pub fn levenberg_marquardt<F>(f: F, x0: &[f64], options: &LmOptions) -> Result<FitResult>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut r = f(&x);
    let m = r.len();
    if m < n {
        return Err(TwpaError::Fit(format!("{m} residuals for {n} parameters")));
    }
    if r.iter().any(|v| !v.is_finite()) {
        return Err(TwpaError::Fit("non-finite residuals at the starting point".into()));
    }
    let mut cost = sum_sq(&r);
    let mut lambda: Option<f64> = None;
    let mut converged = false;
    let mut iterations = 0;
    let mut jac = jacobian(&f, &x, options.jacobian_step, m)?;

    while iterations < options.max_iterations {
        iterations += 1;
        if cost == 0.0 {
            converged = true;
            break;
        }
        let rv = DVector::from_column_slice(&r);
        let jtj = jac.transpose() * &jac;
        let g = jac.transpose() * &rv;
        let rnorm = cost.sqrt();
        let orth = (0..n)
            .map(|j| {
                let d = jtj[(j, j)].sqrt();
                if d > 0.0 { g[j].abs() / (d * rnorm) } else { 0.0 }
            })
            .fold(0.0, f64::max);
        if orth <= options.gtol {
            converged = true;
            break;
        }
        let diag: Vec<f64> = (0..n).map(|j| jtj[(j, j)].max(1e-30)).collect();
        let mut lam = lambda.unwrap_or(1e-3);
        let mut accepted = false;
        while lam < 1e20 {
            let mut a = jtj.clone();
            for j in 0..n {
                a[(j, j)] += lam * diag[j];
            }
            let Some(step) = a.cholesky().map(|c| c.solve(&(-&g))) else {
                lam *= 10.0;
                continue;
            };
            let xn: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            let rn = f(&xn);
            let cn = if rn.iter().all(|v| v.is_finite()) { sum_sq(&rn) } else { f64::INFINITY };
            if cn < cost {
                let rel_decrease = (cost - cn) / cost;
                let rel_step = step.norm() / (DVector::from_column_slice(&x).norm() + options.xtol);
                x = xn;
                r = rn;
                cost = cn;
                lam = (lam / 3.0).max(1e-12);
                accepted = true;
                if rel_decrease < options.ftol || rel_step < options.xtol {
                    converged = true;
                }
                break;
            }
            lam *= 4.0;
        }
        lambda = Some(lam);
        if !accepted {
            // No descent direction left at machine precision.
            converged = orth < 1e-6;
            break;
        }
        jac = jacobian(&f, &x, options.jacobian_step, m)?;
        if converged {
            break;
        }
    }

    let jtj = jac.transpose() * &jac;
    let dof = (m - n).max(1) as f64;
    let s2 = cost / dof;
    let cov = jtj
        .clone()
        .try_inverse()
        .or_else(|| jtj.pseudo_inverse(1e-300).ok())
        .map(|inv| inv * s2)
        .unwrap_or_else(|| DMatrix::from_element(n, n, f64::INFINITY));
    Ok(FitResult {
        uncertainties: (0..n).map(|j| cov[(j, j)].abs().sqrt()).collect(),
        covariance: (0..n).map(|i| (0..n).map(|j| cov[(i, j)]).collect()).collect(),
        parameters: x,
        residual_norm: cost.sqrt(),
        residuals: r,
        converged,
        iterations,
    })
}

/// Runs the fit from every start and keeps the lowest cost.
pub fn best_of_starts<F>(f: F, starts: &[Vec<f64>], options: &LmOptions) -> Result<FitResult>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let mut best: Option<FitResult> = None;
    let mut last_err = None;
    for s in starts {
        match levenberg_marquardt(&f, s, options) {
            Ok(r) => {
                if best.as_ref().is_none_or(|b| r.residual_norm < b.residual_norm) {
                    best = Some(r);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    best.ok_or_else(|| last_err.unwrap_or_else(|| TwpaError::Fit("no starting points".into())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_noiseless_recovery() {
        let t: Vec<f64> = (0..40).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = t.iter().map(|t| 2.5 * (-1.3 * t).exp() + 0.2).collect();
        let f = |p: &[f64]| t.iter().zip(&y).map(|(t, y)| p[0] * (-p[1] * t).exp() + p[2] - y).collect();
        let r = levenberg_marquardt(f, &[1.0, 0.5, 0.0], &LmOptions::default()).unwrap();
        assert!(r.converged);
        assert!((r.parameters[0] - 2.5).abs() < 1e-9);
        assert!((r.parameters[1] - 1.3).abs() < 1e-9);
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(r.residual_norm < 1e-10 * norm);
    }

    #[test]
    fn rosenbrock_minimum() {
        let f = |p: &[f64]| vec![10.0 * (p[1] - p[0] * p[0]), 1.0 - p[0]];
        let r = levenberg_marquardt(f, &[-1.2, 1.0], &LmOptions::default()).unwrap();
        assert!(r.converged);
        assert!((r.parameters[0] - 1.0).abs() < 1e-8 && (r.parameters[1] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn iteration_limit_is_not_convergence() {
        let f = |p: &[f64]| vec![10.0 * (p[1] - p[0] * p[0]), 1.0 - p[0]];
        let opts = LmOptions { max_iterations: 2, ..Default::default() };
        let r = levenberg_marquardt(f, &[-1.2, 1.0], &opts).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations, 2);
    }

    #[test]
    fn linear_fit_uncertainty_matches_closed_form() {
        // y = a x + b with alternating ±0.1 noise; OLS covariance is exact here.
        let x: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().enumerate().map(|(i, x)| 2.0 * x + 1.0 + if i % 2 == 0 { 0.1 } else { -0.1 }).collect();
        let f = |p: &[f64]| x.iter().zip(&y).map(|(x, y)| p[0] * x + p[1] - y).collect();
        let r = levenberg_marquardt(f, &[0.0, 0.0], &LmOptions::default()).unwrap();
        let n = x.len() as f64;
        let sx: f64 = x.iter().sum();
        let sxx: f64 = x.iter().map(|v| v * v).sum();
        let rss: f64 = r.residuals.iter().map(|v| v * v).sum();
        let s2 = rss / (n - 2.0);
        let var_a = s2 * n / (n * sxx - sx * sx);
        assert!((r.uncertainties[0] - var_a.sqrt()).abs() < 1e-6 * var_a.sqrt());
    }
}

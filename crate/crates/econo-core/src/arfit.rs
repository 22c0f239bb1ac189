//! Regression with autoregressive errors, estimated by conditional
//! nonlinear least squares.
//!
//! The model is `y_t = x_t'b + u_t`, `u_t = rho_1 u_{t-1} + ... + rho_p
//! u_{t-p} + eps_t`; the first p quasi-differenced observations are dropped.
//! Minimization is damped Gauss-Newton (Marquardt diagonal scaling). The
//! undamped iteration is unusable here: when an AR root approaches one, the
//! constant's quasi-differenced column collapses and the SSR surface turns
//! into a curved valley with a pole along `sum(rho) = 1`; full Gauss-Newton
//! steps jump straight across it.

use crate::diagnostics::{glejser_from_parts, reset_rows, DiagnosticReport};
use crate::eqspec::{build_design_with_presample, Design, EquationSpec};
use crate::error::{EconoError, Result};
use crate::ols::{summarize, RegressionSummary};
use crate::period::QuarterPeriod;
use crate::series::Dataset;
use nalgebra::{Complex, DMatrix, DVector};

const LAMBDA_INIT: f64 = 1e-2;
const LAMBDA_MIN: f64 = 1e-15;
const SSR_REL_TOL: f64 = 1e-9;
const MAX_ITERATIONS: usize = 500;
/// Inverted roots at or above this modulus flag the process nonstationary.
const STATIONARITY_EPS: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct ArFit {
    pub summary: RegressionSummary,
    pub ar_coefficients: Vec<f64>,
    /// Inverse characteristic roots, sorted by descending modulus.
    pub inverted_roots: Vec<Complex<f64>>,
    pub nonstationary: bool,
    pub iterations: usize,
    pub converged: bool,
    /// Innovations eps_t over the effective sample.
    pub residuals: DVector<f64>,
    /// One-step fit y_t - eps_t over the effective sample.
    pub fitted: DVector<f64>,
    pub(crate) design: Design,
    pub(crate) presample: usize,
    pub(crate) beta: DVector<f64>,
}

/// Implied distributed-lag coefficients of the arithmetic-declining scheme:
/// one estimated slope on the aggregate maps back to `(L+1-i) * delta`.
#[derive(Debug, Clone)]
pub struct FisherLagExpansion {
    pub delta: f64,
    pub lag_depth: usize,
    pub implied: Vec<f64>,
}

pub fn expand_fisher(delta: f64, lag_depth: usize) -> FisherLagExpansion {
    let implied = (0..=lag_depth)
        .map(|i| (lag_depth + 1 - i) as f64 * delta)
        .collect();
    FisherLagExpansion { delta, lag_depth, implied }
}

/// Roots of `z^p - rho_1 z^{p-1} - ... - rho_p = 0` (inverse characteristic
/// roots) and whether any modulus reaches the unit circle.
pub fn inverted_ar_roots(rho: &[f64]) -> (Vec<Complex<f64>>, bool) {
    let p = rho.len();
    if p == 0 {
        return (Vec::new(), false);
    }
    let mut companion = DMatrix::zeros(p, p);
    for (j, r) in rho.iter().enumerate() {
        companion[(0, j)] = *r;
    }
    for i in 1..p {
        companion[(i, i - 1)] = 1.0;
    }
    let mut roots: Vec<Complex<f64>> = companion.complex_eigenvalues().iter().copied().collect();
    roots.sort_by(|a, b| {
        b.norm()
            .partial_cmp(&a.norm())
            .unwrap()
            .then(b.re.partial_cmp(&a.re).unwrap())
    });
    let nonstationary = roots.iter().any(|r| r.norm() >= 1.0 - STATIONARITY_EPS);
    (roots, nonstationary)
}

/// Residuals and Jacobian of the quasi-differenced model at (beta, rho).
fn residual_jacobian(
    y: &DVector<f64>,
    x: &DMatrix<f64>,
    p: usize,
    beta: &DVector<f64>,
    rho: &[f64],
) -> (DVector<f64>, DMatrix<f64>) {
    let n = y.len();
    let k = x.ncols();
    let u = y - x * beta;
    let n_eff = n - p;
    let mut e = DVector::zeros(n_eff);
    let mut jac = DMatrix::zeros(n_eff, k + p);
    for t in p..n {
        let row = t - p;
        let mut et = u[t];
        for (j, r) in rho.iter().enumerate() {
            et -= r * u[t - j - 1];
            jac[(row, k + j)] = -u[t - j - 1];
        }
        e[row] = et;
        for c in 0..k {
            let mut xq = x[(t, c)];
            for (j, r) in rho.iter().enumerate() {
                xq -= r * x[(t - j - 1, c)];
            }
            jac[(row, c)] = -xq;
        }
    }
    (e, jac)
}

struct NlsSolution {
    theta: DVector<f64>,
    e: DVector<f64>,
    jac: DMatrix<f64>,
    ssr: f64,
    iterations: usize,
    converged: bool,
}

fn marquardt(y: &DVector<f64>, x: &DMatrix<f64>, p: usize, theta0: DVector<f64>) -> Result<NlsSolution> {
    let k = x.ncols();
    let split = |th: &DVector<f64>| -> (DVector<f64>, Vec<f64>) {
        (th.rows(0, k).into_owned(), th.rows(k, p).iter().copied().collect())
    };
    let mut theta = theta0;
    let (beta, rho) = split(&theta);
    let (mut e, mut jac) = residual_jacobian(y, x, p, &beta, &rho);
    let mut ssr = e.dot(&e);
    let mut lambda = LAMBDA_INIT;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let a = jac.transpose() * &jac;
        let g = jac.transpose() * &e;
        let mut accepted = None;
        for _ in 0..100 {
            let mut damped = a.clone();
            for i in 0..damped.nrows() {
                damped[(i, i)] += lambda * a[(i, i)].max(f64::MIN_POSITIVE);
            }
            let step = match nalgebra::Cholesky::new(damped) {
                Some(ch) => -ch.solve(&g),
                None => {
                    lambda *= 10.0;
                    continue;
                }
            };
            let cand = &theta + &step;
            let (cb, cr) = split(&cand);
            let (ce, cj) = residual_jacobian(y, x, p, &cb, &cr);
            let cssr = ce.dot(&ce);
            if cssr.is_finite() && cssr < ssr {
                accepted = Some((cand, ce, cj, cssr));
                break;
            }
            lambda *= 10.0;
        }
        match accepted {
            None => {
                // no descent direction left: gradient-stationary
                converged = true;
                break;
            }
            Some((cand, ce, cj, cssr)) => {
                let rel = (ssr - cssr) / ssr;
                theta = cand;
                e = ce;
                jac = cj;
                ssr = cssr;
                lambda = (lambda / 10.0).max(LAMBDA_MIN);
                if rel < SSR_REL_TOL {
                    converged = true;
                    break;
                }
            }
        }
    }
    Ok(NlsSolution { theta, e, jac, ssr, iterations, converged })
}

fn starting_values(y: &DVector<f64>, x: &DMatrix<f64>, p: usize, names: &[String]) -> Result<DVector<f64>> {
    let ols = crate::linalg::lstsq(x, y, names)?;
    let u = y - x * &ols.beta;
    let n = y.len();
    let mut theta = DVector::zeros(x.ncols() + p);
    theta.rows_mut(0, x.ncols()).copy_from(&ols.beta);
    if p > 0 {
        let rows = n - p;
        let ul = DMatrix::from_fn(rows, p, |i, j| u[p + i - j - 1]);
        let uy = DVector::from_fn(rows, |i, _| u[p + i]);
        let rho_names: Vec<String> = (1..=p).map(|j| format!("AR({j})")).collect();
        match crate::linalg::lstsq(&ul, &uy, &rho_names) {
            Ok(sol) => theta.rows_mut(x.ncols(), p).copy_from(&sol.beta),
            Err(_) => {} // zero starting AR coefficients
        }
    }
    Ok(theta)
}

fn build_ar_fit(
    design: Design,
    p: usize,
    sol: NlsSolution,
    has_constant: bool,
) -> Result<ArFit> {
    let k = design.k();
    let n_eff = design.n() - p;
    let k_total = k + p;
    if n_eff <= k_total {
        return Err(EconoError::TooFewObservations { n: n_eff, k: k_total });
    }
    let beta = sol.theta.rows(0, k).into_owned();
    let rho: Vec<f64> = sol.theta.rows(k, p).iter().copied().collect();

    let s2 = sol.ssr / (n_eff - k_total) as f64;
    let jtj = sol.jac.transpose() * &sol.jac;
    let jtj_inv = jtj
        .try_inverse()
        .ok_or(EconoError::Singular("Gauss-Newton Jacobian"))?;
    let se: Vec<f64> = (0..k_total).map(|j| (s2 * jtj_inv[(j, j)]).sqrt()).collect();

    let mut names = design.names.clone();
    for j in 1..=p {
        names.push(format!("AR({j})"));
    }
    let y_eff = design.y.rows(p, n_eff).into_owned();
    let summary = summarize(
        &design.dependent_name,
        &names,
        &y_eff,
        &sol.theta,
        &se,
        &sol.e,
        sol.ssr,
        k_total,
        design.sample,
        has_constant,
    )?;

    let (inverted_roots, nonstationary) = inverted_ar_roots(&rho);
    let fitted = &y_eff - &sol.e;
    Ok(ArFit {
        summary,
        ar_coefficients: rho,
        inverted_roots,
        nonstationary,
        iterations: sol.iterations,
        converged: sol.converged,
        residuals: sol.e,
        fitted,
        design,
        presample: p,
        beta,
    })
}

/// Fit a specification with AR error orders by conditional least squares.
/// Starting values come from plain OLS (beta) and an autoregression of its
/// residuals (rho); iteration stops when the relative SSR improvement falls
/// below 1e-9 or after 500 iterations (then `converged` is false and the
/// best iterate is returned).
pub fn fit_ar_errors(
    spec: &EquationSpec,
    data: &Dataset,
    sample: Option<(QuarterPeriod, QuarterPeriod)>,
) -> Result<ArFit> {
    let (design, p) = build_design_with_presample(spec, data, sample)?;
    let theta0 = starting_values(&design.y, &design.x, p, &design.names)?;
    let sol = marquardt(&design.y, &design.x, p, theta0)?;
    build_ar_fit(design, p, sol, spec.has_constant())
}

/// Glejser heteroskedasticity test of an AR fit: |innovations| regressed on
/// the structural regressors over the effective sample.
pub fn glejser_ar(fit: &ArFit) -> Result<DiagnosticReport> {
    let p = fit.presample;
    let n_eff = fit.design.n() - p;
    let x = fit.design.x.rows(p, n_eff).into_owned();
    let abs_resid = fit.residuals.map(f64::abs);
    glejser_from_parts(
        &x,
        &fit.design.names,
        abs_resid,
        fit.summary.se_regression * fit.summary.se_regression,
        fit.design.sample,
        fit.design.names.iter().any(|n| n == "C"),
    )
}

/// Ramsey RESET for an AR fit: append FITTED^2..FITTED^m and re-estimate
/// with the same AR orders. The fitted series is the one-step fit; its two
/// pre-sample values (needed for quasi-differencing the new regressor) are
/// built one-sidedly from the structural fit and the available lagged
/// structural residuals.
pub fn ramsey_reset_ar(fit: &ArFit, max_power: u32) -> Result<DiagnosticReport> {
    if max_power < 2 {
        return Err(EconoError::InvalidArgument("RESET needs powers up to at least 2".into()));
    }
    let p = fit.presample;
    let n = fit.design.n();
    let n_eff = n - p;
    let k = fit.design.k();

    // one-step fitted values over the whole design span
    let u = &fit.design.y - &fit.design.x * &fit.beta;
    let mut fitted_full = DVector::zeros(n);
    for t in 0..n {
        let mut f = fit.design.y[t] - u[t]; // structural fit x_t'b
        for (j, r) in fit.ar_coefficients.iter().enumerate() {
            if t > j {
                f += r * u[t - j - 1];
            }
        }
        fitted_full[t] = f;
    }

    let extra = (max_power - 1) as usize;
    let mut x = DMatrix::zeros(n, k + extra);
    x.view_mut((0, 0), (n, k)).copy_from(&fit.design.x);
    let mut names = fit.design.names.clone();
    for (idx, pw) in (2..=max_power).enumerate() {
        for t in 0..n {
            x[(t, k + idx)] = fitted_full[t].powi(pw as i32);
        }
        names.push(format!("FITTED^{pw}"));
    }
    let mut design = fit.design.clone();
    design.x = x;
    design.names = names;

    let theta0 = starting_values(&design.y, &design.x, p, &design.names)?;
    let sol = marquardt(&design.y, &design.x, p, theta0)?;
    let aug = build_ar_fit(design, p, sol, fit.design.names.iter().any(|n| n == "C"))?;

    let q = extra as f64;
    let dof = (n_eff - k - extra - p) as f64;
    let ssr_r = fit.summary.ssr;
    let ssr_u = aug.summary.ssr;
    let f = ((ssr_r - ssr_u) / q) / (ssr_u / dof);
    let lr = n_eff as f64 * (ssr_r / ssr_u).ln();
    let rows = reset_rows(f, lr, q, dof)?;
    Ok(DiagnosticReport { test: "Ramsey RESET Test".into(), rows, aux: Some(aug.summary) })
}

//! Ordinary least squares with the full summary panel.

use crate::dist::{tail_prob, two_sided, TailDist};
use crate::eqspec::{build_design, Design, EquationSpec};
use crate::error::{EconoError, Result};
use crate::period::QuarterPeriod;
use crate::series::Dataset;
use crate::linalg;
use nalgebra::{DMatrix, DVector};

/// One row of the coefficient block.
#[derive(Debug, Clone)]
pub struct CoefficientRow {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    pub t_stat: f64,
    pub prob: f64,
}

/// Coefficient table plus the statistic panel printed under it.
#[derive(Debug, Clone)]
pub struct RegressionSummary {
    pub dependent: String,
    pub rows: Vec<CoefficientRow>,
    pub n: usize,
    pub k: usize,
    pub r_squared: f64,
    pub adj_r_squared: f64,
    pub se_regression: f64,
    pub ssr: f64,
    pub log_likelihood: f64,
    pub f_stat: Option<f64>,
    pub prob_f: Option<f64>,
    pub durbin_watson: f64,
    pub aic: f64,
    pub sc: f64,
    pub hq: f64,
    pub mean_dep: f64,
    pub sd_dep: f64,
    pub sample: (QuarterPeriod, QuarterPeriod),
}

/// A completed fit: the summary plus everything diagnostics need.
#[derive(Debug, Clone)]
pub struct OlsFit {
    pub summary: RegressionSummary,
    pub residuals: DVector<f64>,
    pub fitted: DVector<f64>,
    pub design: Design,
    pub xtx_inv: DMatrix<f64>,
}

impl OlsFit {
    /// Period of residual row `i`.
    pub fn period_of_row(&self, i: usize) -> QuarterPeriod {
        self.design.sample.0.offset(i as i64)
    }
}

pub fn durbin_watson(residuals: &[f64]) -> Result<f64> {
    if residuals.len() < 2 {
        return Err(EconoError::TooFewObservations { n: residuals.len(), k: 2 });
    }
    let ssr: f64 = residuals.iter().map(|e| e * e).sum();
    if ssr <= 0.0 {
        return Err(EconoError::Degenerate("zero residual sum of squares".into()));
    }
    let num: f64 = residuals.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum();
    Ok(num / ssr)
}

/// Gaussian log-likelihood implied by a least-squares fit.
pub fn gaussian_log_likelihood(n: usize, ssr: f64) -> f64 {
    let n = n as f64;
    -(n / 2.0) * (1.0 + (2.0 * std::f64::consts::PI).ln() + (ssr / n).ln())
}

/// Assemble the summary panel from a solved least-squares problem.
pub(crate) fn summarize(
    dependent: &str,
    names: &[String],
    y: &DVector<f64>,
    beta: &DVector<f64>,
    se: &[f64],
    residuals: &DVector<f64>,
    ssr: f64,
    k_for_dof: usize,
    sample: (QuarterPeriod, QuarterPeriod),
    has_constant: bool,
) -> Result<RegressionSummary> {
    let n = y.len();
    let k = k_for_dof;
    let dof = (n - k) as f64;

    let rows = names
        .iter()
        .zip(beta.iter())
        .zip(se.iter())
        .map(|((name, b), s)| {
            let t = b / s;
            // a zero standard error (perfect fit) makes t infinite
            let prob = if t.is_finite() {
                two_sided(TailDist::StudentT { df: dof }, t)?
            } else {
                0.0
            };
            Ok(CoefficientRow {
                name: name.clone(),
                estimate: *b,
                std_error: *s,
                t_stat: t,
                prob,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mean_dep = y.mean();
    let tss: f64 = y.iter().map(|v| (v - mean_dep).powi(2)).sum();
    let sd_dep = (tss / (n as f64 - 1.0)).sqrt();
    let r_squared = 1.0 - ssr / tss;
    let adj_r_squared = 1.0 - (1.0 - r_squared) * (n as f64 - 1.0) / dof;
    let se_regression = (ssr / dof).sqrt();
    let log_likelihood = gaussian_log_likelihood(n, ssr);
    let nf = n as f64;
    let kf = k as f64;
    let aic = -2.0 * log_likelihood / nf + 2.0 * kf / nf;
    let sc = -2.0 * log_likelihood / nf + kf * nf.ln() / nf;
    let hq = -2.0 * log_likelihood / nf + 2.0 * kf * nf.ln().ln() / nf;

    let f_with_prob = |f: f64, q: f64| -> Result<(Option<f64>, Option<f64>)> {
        if f.is_finite() {
            Ok((Some(f), Some(tail_prob(TailDist::F { df1: q, df2: dof }, f)?)))
        } else {
            Ok((Some(f), Some(0.0)))
        }
    };
    let (f_stat, prob_f) = if has_constant && k > 1 {
        let q = kf - 1.0;
        f_with_prob((r_squared / q) / ((1.0 - r_squared) / dof), q)?
    } else if !has_constant && k >= 1 {
        let ess = y.dot(y) - ssr;
        f_with_prob((ess / kf) / (ssr / dof), kf)?
    } else {
        (None, None)
    };

    Ok(RegressionSummary {
        dependent: dependent.to_string(),
        rows,
        n,
        k,
        r_squared,
        adj_r_squared,
        se_regression,
        ssr,
        log_likelihood,
        f_stat,
        prob_f,
        durbin_watson: durbin_watson(residuals.as_slice()).unwrap_or(f64::NAN),
        aic,
        sc,
        hq,
        mean_dep,
        sd_dep,
        sample,
    })
}

/// Fit a specification (without AR terms) by least squares.
pub fn fit_ols(
    spec: &EquationSpec,
    data: &Dataset,
    sample: Option<(QuarterPeriod, QuarterPeriod)>,
) -> Result<OlsFit> {
    if !spec.ar_orders.is_empty() {
        return Err(EconoError::InvalidArgument(
            "specification has AR error terms; use fit_ar_errors".into(),
        ));
    }
    let design = build_design(spec, data, sample)?;
    fit_design(design, spec.has_constant())
}

/// Least squares on an already-built design.
pub fn fit_design(design: Design, has_constant: bool) -> Result<OlsFit> {
    let n = design.n();
    let k = design.k();
    if n <= k {
        return Err(EconoError::TooFewObservations { n, k });
    }
    let sol = linalg::lstsq(&design.x, &design.y, &design.names)?;
    let s2 = sol.ssr / (n - k) as f64;
    let se: Vec<f64> = (0..k).map(|j| (s2 * sol.xtx_inv[(j, j)]).sqrt()).collect();
    let summary = summarize(
        &design.dependent_name,
        &design.names,
        &design.y,
        &sol.beta,
        &se,
        &sol.residuals,
        sol.ssr,
        k,
        design.sample,
        has_constant,
    )?;
    Ok(OlsFit {
        summary,
        residuals: sol.residuals,
        fitted: sol.fitted,
        design,
        xtx_inv: sol.xtx_inv,
    })
}

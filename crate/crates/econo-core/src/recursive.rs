//! Recursive residuals for structural-break detection: standardized one-step
//! prediction errors from an expanding-window least-squares fit.

use crate::eqspec::{build_design, EquationSpec};
use crate::error::{EconoError, Result};
use crate::linalg::RANK_TOL;
use crate::period::QuarterPeriod;
use crate::series::Dataset;
use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone)]
pub struct RecursiveReport {
    /// Period of each recursive residual.
    pub periods: Vec<QuarterPeriod>,
    /// Standardized recursive residuals w_t.
    pub residuals: Vec<f64>,
    /// +/- band at each t: 2 x running standard error of the w's so far.
    pub bands: Vec<f64>,
    /// Periods where |w_t| exceeds the band.
    pub flagged: Vec<QuarterPeriod>,
    /// Span skipped because the early design was singular, if any.
    pub skipped: Option<(QuarterPeriod, QuarterPeriod)>,
}

/// Compute recursive residuals of a (no-AR) specification:
/// `w_t = (y_t - x_t'b_{t-1}) / sqrt(1 + x_t' (X_{t-1}'X_{t-1})^-1 x_t)`,
/// updating the fit one observation at a time from the first k-observation
/// solution.
pub fn recursive_residuals(
    spec: &EquationSpec,
    data: &Dataset,
    sample: Option<(QuarterPeriod, QuarterPeriod)>,
) -> Result<RecursiveReport> {
    if !spec.ar_orders.is_empty() {
        return Err(EconoError::InvalidArgument("recursive residuals are OLS-only".into()));
    }
    let design = build_design(spec, data, sample)?;
    let (n, k) = (design.n(), design.k());
    if n <= k + 1 {
        return Err(EconoError::TooFewObservations { n, k: k + 1 });
    }

    // seed the recursion with the smallest invertible leading block
    let mut t0 = k;
    let mut inv: Option<DMatrix<f64>> = None;
    while t0 < n {
        let head = design.x.rows(0, t0);
        let xtx = head.transpose() * head;
        if invertible(&xtx) {
            inv = xtx.try_inverse();
            break;
        }
        t0 += 1;
    }
    let mut p_mat = inv.ok_or(EconoError::Singular("recursive seed"))?;
    let skipped = if t0 > k {
        Some((design.sample.0.offset(k as i64), design.sample.0.offset(t0 as i64 - 1)))
    } else {
        None
    };

    let head = design.x.rows(0, t0);
    let yhead = design.y.rows(0, t0);
    let mut beta: DVector<f64> = &p_mat * (head.transpose() * yhead);

    let mut periods = Vec::with_capacity(n - t0);
    let mut residuals = Vec::with_capacity(n - t0);
    let mut bands = Vec::with_capacity(n - t0);
    let mut flagged = Vec::new();
    let mut sum_sq = 0.0;

    for t in t0..n {
        let x_t = design.x.row(t).transpose();
        let px = &p_mat * &x_t;
        let d = 1.0 + x_t.dot(&px);
        let pred_err = design.y[t] - x_t.dot(&beta);
        let w = pred_err / d.sqrt();

        periods.push(design.sample.0.offset(t as i64));
        residuals.push(w);
        sum_sq += w * w;
        let running_se = (sum_sq / residuals.len() as f64).sqrt();
        let band = 2.0 * running_se;
        bands.push(band);
        if w.abs() > band {
            flagged.push(design.sample.0.offset(t as i64));
        }

        // Sherman-Morrison update of (X'X)^-1 and the coefficients
        let gain = &px / d;
        beta += &gain * pred_err;
        p_mat -= &gain * px.transpose();
    }

    Ok(RecursiveReport { periods, residuals, bands, flagged, skipped })
}

fn invertible(xtx: &DMatrix<f64>) -> bool {
    let svd = xtx.clone().svd(false, false);
    let max_sv = svd.singular_values.max();
    max_sv > 0.0 && svd.singular_values.iter().all(|s| *s > RANK_TOL * max_sv)
}

//! VAR(p) estimation and its downstream analytics.

mod analysis;
mod select;

pub use analysis::{
    cholesky_irf, fevd, granger_block_exogeneity, stability_roots, BandSpec, FevdRow, FevdTable,
    GrangerReport, GrangerRow, ImpulseResponseSet,
};
pub use select::{lag_order_selection, LagSelectionRow};

use crate::error::{EconoError, Result};
use crate::linalg;
use crate::ols::{summarize, RegressionSummary};
use crate::period::QuarterPeriod;
use crate::series::Dataset;
use nalgebra::{DMatrix, DVector};

/// A fitted k-variable VAR(p).
#[derive(Debug, Clone)]
pub struct VarModel {
    pub variables: Vec<String>,
    pub p: usize,
    /// A_l\[(i, j)\] is the coefficient of variable j, lag l+1, in equation i.
    pub a_mats: Vec<DMatrix<f64>>,
    pub intercept: DVector<f64>,
    /// T_eff x k residual matrix.
    pub residuals: DMatrix<f64>,
    /// Residual covariance, divisor T - m (per-equation regressor count m).
    pub sigma_adj: DMatrix<f64>,
    /// Residual covariance, divisor T.
    pub sigma_ml: DMatrix<f64>,
    pub per_equation: Vec<RegressionSummary>,
    pub log_likelihood: f64,
    pub aic: f64,
    pub sc: f64,
    pub sample: (QuarterPeriod, QuarterPeriod),
    pub t_eff: usize,
    /// Stacked m x k coefficient matrix (columns are equations; rows are
    /// variable-major lags then the constant).
    pub(crate) coef: DMatrix<f64>,
    pub(crate) xtx_inv: DMatrix<f64>,
}

impl VarModel {
    pub fn k(&self) -> usize {
        self.variables.len()
    }

    /// Per-equation coefficient count, k*p + 1.
    pub fn m(&self) -> usize {
        self.k() * self.p + 1
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.eq_ignore_ascii_case(name))
    }

    /// Row range of `var`'s lag block in the stacked coefficient layout.
    pub(crate) fn lag_block(&self, var: usize) -> std::ops::Range<usize> {
        var * self.p..(var + 1) * self.p
    }
}

/// Estimate a VAR(p) equation by equation with a shared design of p lags of
/// every variable plus a constant.
pub fn fit_var(
    data: &Dataset,
    variables: &[String],
    p: usize,
    sample: Option<(QuarterPeriod, QuarterPeriod)>,
) -> Result<VarModel> {
    if variables.is_empty() || p == 0 {
        return Err(EconoError::InvalidArgument("need at least one variable and one lag".into()));
    }
    let k = variables.len();
    let m = k * p + 1;

    let mut series = Vec::with_capacity(k);
    let mut start = None::<QuarterPeriod>;
    let mut end = None::<QuarterPeriod>;
    for name in variables {
        let s = data
            .get(name)
            .ok_or_else(|| EconoError::UnknownSeries(name.clone()))?;
        start = Some(start.map_or(s.start(), |c: QuarterPeriod| c.max(s.start())));
        end = Some(end.map_or(s.end(), |c: QuarterPeriod| c.min(s.end())));
        series.push(s);
    }
    let (mut start, mut end) = (start.unwrap(), end.unwrap());
    if let Some((from, to)) = sample {
        start = start.max(from);
        end = end.min(to);
    }
    if end < start {
        return Err(EconoError::EmptySample);
    }
    let total = (end.quarters_since(&start) + 1) as usize;
    if total <= p + m {
        return Err(EconoError::TooFewObservations { n: total.saturating_sub(p), k: m });
    }
    let t_eff = total - p;
    let eff_start = start.offset(p as i64);

    let value = |v: usize, t: i64| series[v].value_at(start.offset(t)).unwrap();

    let mut x = DMatrix::zeros(t_eff, m);
    let mut names = Vec::with_capacity(m);
    for v in 0..k {
        for l in 1..=p {
            names.push(format!("{}(-{})", variables[v], l));
        }
    }
    names.push("C".to_string());
    for row in 0..t_eff {
        let t = (row + p) as i64;
        let mut c = 0;
        for v in 0..k {
            for l in 1..=p {
                x[(row, c)] = value(v, t - l as i64);
                c += 1;
            }
        }
        x[(row, m - 1)] = 1.0;
    }

    let mut coef = DMatrix::zeros(m, k);
    let mut residuals = DMatrix::zeros(t_eff, k);
    let mut per_equation = Vec::with_capacity(k);
    let mut xtx_inv = None;
    for j in 0..k {
        let y = DVector::from_fn(t_eff, |row, _| value(j, (row + p) as i64));
        let sol = linalg::lstsq(&x, &y, &names)?;
        let s2 = sol.ssr / (t_eff - m) as f64;
        let se: Vec<f64> = (0..m).map(|c| (s2 * sol.xtx_inv[(c, c)]).sqrt()).collect();
        let summary = summarize(
            &variables[j],
            &names,
            &y,
            &sol.beta,
            &se,
            &sol.residuals,
            sol.ssr,
            m,
            (eff_start, end),
            true,
        )?;
        coef.set_column(j, &sol.beta);
        residuals.set_column(j, &sol.residuals);
        per_equation.push(summary);
        xtx_inv.get_or_insert(sol.xtx_inv);
    }
    let xtx_inv = xtx_inv.unwrap();

    let cross = residuals.transpose() * &residuals;
    let sigma_adj = &cross / (t_eff - m) as f64;
    let sigma_ml = &cross / t_eff as f64;

    let log_likelihood = system_log_likelihood(t_eff, k, sigma_ml.determinant());
    let tf = t_eff as f64;
    let total_coefs = (k * m) as f64;
    let aic = -2.0 * log_likelihood / tf + 2.0 * total_coefs / tf;
    let sc = -2.0 * log_likelihood / tf + total_coefs * tf.ln() / tf;

    let mut a_mats = Vec::with_capacity(p);
    for l in 0..p {
        let mut a = DMatrix::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                a[(i, j)] = coef[(j * p + l, i)];
            }
        }
        a_mats.push(a);
    }
    let intercept = DVector::from_fn(k, |i, _| coef[(m - 1, i)]);

    Ok(VarModel {
        variables: variables.to_vec(),
        p,
        a_mats,
        intercept,
        residuals,
        sigma_adj,
        sigma_ml,
        per_equation,
        log_likelihood,
        aic,
        sc,
        sample: (eff_start, end),
        t_eff,
        coef,
        xtx_inv,
    })
}

/// `logL = -(T/2) (k (1 + log 2 pi) + log det Sigma_ml)`.
pub(crate) fn system_log_likelihood(t_eff: usize, k: usize, det_sigma_ml: f64) -> f64 {
    let t = t_eff as f64;
    -(t / 2.0) * (k as f64 * (1.0 + (2.0 * std::f64::consts::PI).ln()) + det_sigma_ml.ln())
}

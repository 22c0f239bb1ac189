//! Lag-order selection over a common trimmed sample.

use super::system_log_likelihood;
use crate::dist::chi_square_critical;
use crate::error::{EconoError, Result};
use crate::linalg;
use crate::period::QuarterPeriod;
use crate::series::Dataset;
use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone)]
pub struct LagSelectionRow {
    pub lag: usize,
    pub log_l: f64,
    /// Sequential modified LR statistic; None for lag zero.
    pub lr: Option<f64>,
    pub fpe: f64,
    pub aic: f64,
    pub sc: f64,
    pub hq: f64,
    pub star_lr: bool,
    pub star_fpe: bool,
    pub star_aic: bool,
    pub star_sc: bool,
    pub star_hq: bool,
}

/// Evaluate lag orders `0..=max_lag`, all on the sample trimmed by
/// `max_lag` so every candidate uses identical observations. LR is the
/// small-sample-modified sequential statistic `(T - m)(log det S_{l-1} -
/// log det S_l)` with m the per-equation regressor count of the larger
/// model, starred at the last rejection of a 5% chi-square(k^2) test;
/// the other criteria star their minimum (smallest lag on ties).
pub fn lag_order_selection(
    data: &Dataset,
    variables: &[String],
    max_lag: usize,
    sample: Option<(QuarterPeriod, QuarterPeriod)>,
) -> Result<Vec<LagSelectionRow>> {
    if variables.is_empty() || max_lag == 0 {
        return Err(EconoError::InvalidArgument("need variables and max_lag >= 1".into()));
    }
    let k = variables.len();
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
    let total = (end.quarters_since(&start) + 1).max(0) as usize;
    let m_max = k * max_lag + 1;
    if total <= max_lag + m_max {
        return Err(EconoError::TooFewObservations {
            n: total.saturating_sub(max_lag),
            k: m_max,
        });
    }
    let t_eff = total - max_lag;
    let tf = t_eff as f64;
    let value = |v: usize, t: i64| series[v].value_at(start.offset(t)).unwrap();

    let mut rows: Vec<LagSelectionRow> = Vec::with_capacity(max_lag + 1);
    let mut prev_logdet = None::<f64>;
    let crit = chi_square_critical((k * k) as f64, 0.05);
    for lag in 0..=max_lag {
        let m = k * lag + 1;
        let mut x = DMatrix::zeros(t_eff, m);
        for row in 0..t_eff {
            let t = (row + max_lag) as i64;
            let mut c = 0;
            for v in 0..k {
                for l in 1..=lag {
                    x[(row, c)] = value(v, t - l as i64);
                    c += 1;
                }
            }
            x[(row, m - 1)] = 1.0;
        }
        let names: Vec<String> = (0..m).map(|c| format!("x{c}")).collect();
        let mut resid = DMatrix::zeros(t_eff, k);
        for j in 0..k {
            let y = DVector::from_fn(t_eff, |row, _| value(j, (row + max_lag) as i64));
            let sol = linalg::lstsq(&x, &y, &names)?;
            resid.set_column(j, &sol.residuals);
        }
        let sigma = resid.transpose() * &resid / tf;
        let det = sigma.determinant();
        let logdet = det.ln();
        let log_l = system_log_likelihood(t_eff, k, det);
        let mf = m as f64;
        let kc = (k * m) as f64;
        let aic = -2.0 * log_l / tf + 2.0 * kc / tf;
        let sc = -2.0 * log_l / tf + kc * tf.ln() / tf;
        let hq = -2.0 * log_l / tf + 2.0 * kc * tf.ln().ln() / tf;
        let fpe = ((tf + mf) / (tf - mf)).powi(k as i32) * det;
        let lr = prev_logdet.map(|prev| (tf - mf) * (prev - logdet));
        prev_logdet = Some(logdet);
        rows.push(LagSelectionRow {
            lag,
            log_l,
            lr,
            fpe,
            aic,
            sc,
            hq,
            star_lr: false,
            star_fpe: false,
            star_aic: false,
            star_sc: false,
            star_hq: false,
        });
    }

    if let Some(last_reject) = rows
        .iter()
        .rev()
        .find(|r| r.lr.map_or(false, |v| v > crit))
        .map(|r| r.lag)
    {
        rows[last_reject].star_lr = true;
    }
    star_min(&mut rows, |r| r.fpe, |r| &mut r.star_fpe);
    star_min(&mut rows, |r| r.aic, |r| &mut r.star_aic);
    star_min(&mut rows, |r| r.sc, |r| &mut r.star_sc);
    star_min(&mut rows, |r| r.hq, |r| &mut r.star_hq);
    Ok(rows)
}

fn star_min(
    rows: &mut [LagSelectionRow],
    value: impl Fn(&LagSelectionRow) -> f64,
    flag: impl Fn(&mut LagSelectionRow) -> &mut bool,
) {
    let mut best = 0;
    for i in 1..rows.len() {
        if value(&rows[i]) < value(&rows[best]) {
            best = i;
        }
    }
    *flag(&mut rows[best]) = true;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::period::QuarterPeriod;
    use crate::series::QuarterlySeries;

    fn q(y: i32, qt: u8) -> QuarterPeriod {
        QuarterPeriod::new(y, qt).unwrap()
    }

    #[test]
    fn lag_zero_log_likelihood_is_the_mean_only_system() {
        // With no regressors but the constant, each equation's residual is the
        // demeaned series; check against the closed-form Gaussian likelihood.
        let mut d = Dataset::new();
        let a: Vec<f64> = (0..40).map(|i| ((i * 17) % 13) as f64).collect();
        let b: Vec<f64> = (0..40).map(|i| ((i * 11) % 7) as f64 - 3.0).collect();
        d.insert(QuarterlySeries::new("A", q(2000, 1), a.clone()).unwrap()).unwrap();
        d.insert(QuarterlySeries::new("B", q(2000, 1), b.clone()).unwrap()).unwrap();
        let rows =
            lag_order_selection(&d, &["A".to_string(), "B".to_string()], 2, None).unwrap();
        let t = 38; // 40 - max_lag
        let demean = |v: &[f64]| -> Vec<f64> {
            let s = &v[2..];
            let m = s.iter().sum::<f64>() / t as f64;
            s.iter().map(|x| x - m).collect()
        };
        let ea = demean(&a);
        let eb = demean(&b);
        let tf = t as f64;
        let s11 = ea.iter().map(|x| x * x).sum::<f64>() / tf;
        let s22 = eb.iter().map(|x| x * x).sum::<f64>() / tf;
        let s12 = ea.iter().zip(&eb).map(|(x, y)| x * y).sum::<f64>() / tf;
        let det = s11 * s22 - s12 * s12;
        let expected = -(tf / 2.0) * (2.0 * (1.0 + (2.0 * std::f64::consts::PI).ln()) + det.ln());
        assert!((rows[0].log_l - expected).abs() < 1e-8);
        assert!(rows[0].lr.is_none());
    }

    #[test]
    fn each_criterion_column_has_exactly_one_star() {
        let d = super::super::tests::simulated_dataset(90, 21);
        let rows =
            lag_order_selection(&d, &["A".to_string(), "B".to_string()], 5, None).unwrap();
        assert_eq!(rows.len(), 6);
        assert_eq!(rows.iter().filter(|r| r.star_fpe).count(), 1);
        assert_eq!(rows.iter().filter(|r| r.star_aic).count(), 1);
        assert_eq!(rows.iter().filter(|r| r.star_sc).count(), 1);
        assert_eq!(rows.iter().filter(|r| r.star_hq).count(), 1);
        assert!(rows.iter().filter(|r| r.star_lr).count() <= 1);
    }
}

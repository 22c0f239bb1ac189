//! Residual diagnostics: normality, heteroskedasticity and functional form.

use crate::dist::{tail_prob, TailDist};
use crate::error::{EconoError, Result};
use crate::linalg;
use crate::ols::{fit_design, summarize, OlsFit, RegressionSummary};
use nalgebra::{DMatrix, DVector};

/// One statistic line of a diagnostic block, e.g.
/// `F-statistic  0.681293  Prob. F(2,49)  0.5107`.
#[derive(Debug, Clone)]
pub struct DiagnosticRow {
    pub label: String,
    pub value: f64,
    pub prob_label: String,
    pub prob: f64,
}

#[derive(Debug, Clone)]
pub struct DiagnosticReport {
    pub test: String,
    pub rows: Vec<DiagnosticRow>,
    /// The auxiliary/test regression, when the test estimates one.
    pub aux: Option<RegressionSummary>,
}

/// Sample skewness and (raw) kurtosis of a sequence.
pub fn moments(e: &[f64]) -> Result<(f64, f64)> {
    let n = e.len() as f64;
    let mean = e.iter().sum::<f64>() / n;
    let m2 = e.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    if m2 <= 0.0 {
        return Err(EconoError::Degenerate("zero-variance residuals".into()));
    }
    let m3 = e.iter().map(|v| (v - mean).powi(3)).sum::<f64>() / n;
    let m4 = e.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n;
    Ok((m3 / m2.powf(1.5), m4 / (m2 * m2)))
}

/// Jarque-Bera normality test: `JB = n/6 (S^2 + (K-3)^2/4)`, chi-square(2).
pub fn jarque_bera(residuals: &[f64]) -> Result<DiagnosticReport> {
    if residuals.len() < 4 {
        return Err(EconoError::TooFewObservations { n: residuals.len(), k: 4 });
    }
    let (s, k) = moments(residuals)?;
    let n = residuals.len() as f64;
    let jb = n / 6.0 * (s * s + (k - 3.0).powi(2) / 4.0);
    let p = tail_prob(TailDist::ChiSquare { df: 2.0 }, jb)?;
    Ok(DiagnosticReport {
        test: "Jarque-Bera".into(),
        rows: vec![
            DiagnosticRow {
                label: "Jarque-Bera".into(),
                value: jb,
                prob_label: "Probability".into(),
                prob: p,
            },
            DiagnosticRow { label: "Skewness".into(), value: s, prob_label: String::new(), prob: f64::NAN },
            DiagnosticRow { label: "Kurtosis".into(), value: k, prob_label: String::new(), prob: f64::NAN },
        ],
        aux: None,
    })
}

/// Glejser heteroskedasticity test shared by OLS and AR-error fits: regress
/// |residual| on the structural regressors. `s2_orig` is the squared
/// standard error of the original regression (the scaled-explained-SS
/// denominator works out to (1 - 2/pi) * s^2).
pub(crate) fn glejser_from_parts(
    x: &DMatrix<f64>,
    names: &[String],
    abs_resid: DVector<f64>,
    s2_orig: f64,
    sample: (crate::period::QuarterPeriod, crate::period::QuarterPeriod),
    has_constant: bool,
) -> Result<DiagnosticReport> {
    let n = abs_resid.len();
    let k = x.ncols();
    let sol = linalg::lstsq(x, &abs_resid, names)?;
    let s2_aux = sol.ssr / (n - k) as f64;
    let se: Vec<f64> = (0..k).map(|j| (s2_aux * sol.xtx_inv[(j, j)]).sqrt()).collect();
    let aux = summarize(
        "ARESID",
        names,
        &abs_resid,
        &sol.beta,
        &se,
        &sol.residuals,
        sol.ssr,
        k,
        sample,
        has_constant,
    )?;

    let q = (k - 1) as f64;
    let dof = (n - k) as f64;
    let r2 = aux.r_squared;
    let f = (r2 / q) / ((1.0 - r2) / dof);
    let obs_r2 = n as f64 * r2;
    let mean = abs_resid.mean();
    let tss: f64 = abs_resid.iter().map(|v| (v - mean).powi(2)).sum();
    let ess = tss - sol.ssr;
    let scaled = ess / ((1.0 - 2.0 / std::f64::consts::PI) * s2_orig);

    let rows = vec![
        DiagnosticRow {
            label: "F-statistic".into(),
            value: f,
            prob_label: format!("Prob. F({},{})", q as usize, dof as usize),
            prob: tail_prob(TailDist::F { df1: q, df2: dof }, f)?,
        },
        DiagnosticRow {
            label: "Obs*R-squared".into(),
            value: obs_r2,
            prob_label: format!("Prob. Chi-Square({})", q as usize),
            prob: tail_prob(TailDist::ChiSquare { df: q }, obs_r2)?,
        },
        DiagnosticRow {
            label: "Scaled explained SS".into(),
            value: scaled,
            prob_label: format!("Prob. Chi-Square({})", q as usize),
            prob: tail_prob(TailDist::ChiSquare { df: q }, scaled)?,
        },
    ];
    Ok(DiagnosticReport { test: "Heteroskedasticity Test: Glejser".into(), rows, aux: Some(aux) })
}

/// Glejser test of an OLS fit.
pub fn glejser(fit: &OlsFit) -> Result<DiagnosticReport> {
    let abs_resid = fit.residuals.map(f64::abs);
    glejser_from_parts(
        &fit.design.x,
        &fit.design.names,
        abs_resid,
        fit.summary.se_regression * fit.summary.se_regression,
        fit.design.sample,
        fit.design.names.iter().any(|n| n == "C"),
    )
}

/// Ramsey RESET for an OLS fit: re-estimate with FITTED^2..FITTED^m added
/// and test the added terms.
pub fn ramsey_reset(fit: &OlsFit, max_power: u32) -> Result<DiagnosticReport> {
    if max_power < 2 {
        return Err(EconoError::InvalidArgument("RESET needs powers up to at least 2".into()));
    }
    if fit.summary.ssr <= 1e-12 * fit.design.y.dot(&fit.design.y) {
        return Err(EconoError::Degenerate("perfect fit: fitted powers carry no information".into()));
    }
    let n = fit.design.n();
    let k = fit.design.k();
    let extra = (max_power - 1) as usize;
    let mut x = DMatrix::zeros(n, k + extra);
    x.view_mut((0, 0), (n, k)).copy_from(&fit.design.x);
    let mut names = fit.design.names.clone();
    for (idx, pw) in (2..=max_power).enumerate() {
        for i in 0..n {
            x[(i, k + idx)] = fit.fitted[i].powi(pw as i32);
        }
        names.push(format!("FITTED^{pw}"));
    }
    let mut design = fit.design.clone();
    design.x = x;
    design.names = names;
    let aug = fit_design(design, fit.design.names.iter().any(|n| n == "C"))?;

    let q = extra as f64;
    let dof = (n - k - extra) as f64;
    let ssr_r = fit.summary.ssr;
    let ssr_u = aug.summary.ssr;
    let f = ((ssr_r - ssr_u) / q) / (ssr_u / dof);
    let lr = n as f64 * (ssr_r / ssr_u).ln();
    let rows = reset_rows(f, lr, q, dof)?;
    Ok(DiagnosticReport { test: "Ramsey RESET Test".into(), rows, aux: Some(aug.summary) })
}

pub(crate) fn reset_rows(f: f64, lr: f64, q: f64, dof: f64) -> Result<Vec<DiagnosticRow>> {
    Ok(vec![
        DiagnosticRow {
            label: "F-statistic".into(),
            value: f,
            prob_label: format!("Prob. F({},{})", q as usize, dof as usize),
            prob: tail_prob(TailDist::F { df1: q, df2: dof }, f)?,
        },
        DiagnosticRow {
            label: "Log likelihood ratio".into(),
            value: lr,
            prob_label: format!("Prob. Chi-Square({})", q as usize),
            prob: tail_prob(TailDist::ChiSquare { df: q }, lr)?,
        },
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eqspec::parse_equation;
    use crate::ols::fit_ols;
    use crate::period::QuarterPeriod;
    use crate::series::{Dataset, QuarterlySeries};

    fn q(y: i32, qt: u8) -> QuarterPeriod {
        QuarterPeriod::new(y, qt).unwrap()
    }

    #[test]
    fn jb_of_symmetric_two_point_sample() {
        // alternating +/-1: S = 0, K = 1, so JB = n/6 * (1-3)^2/4 = n/6
        let e: Vec<f64> = (0..10).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let rep = jarque_bera(&e).unwrap();
        assert!((rep.rows[0].value - 10.0 / 6.0).abs() < 1e-12);
        assert!((rep.rows[1].value - 0.0).abs() < 1e-12);
        assert!((rep.rows[2].value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn jb_rejects_degenerate_input() {
        assert!(jarque_bera(&[1.0, 1.0, 1.0, 1.0]).is_err());
        assert!(jarque_bera(&[1.0, -1.0]).is_err());
    }

    fn noisy_fit() -> OlsFit {
        let mut d = Dataset::new();
        let x: Vec<f64> = (0..40).map(|i| (i as f64 * 0.37).sin() * 3.0 + 0.1 * i as f64).collect();
        let y: Vec<f64> = x
            .iter()
            .enumerate()
            .map(|(i, v)| 1.0 + 2.0 * v + ((i * 2654435761) % 97) as f64 / 97.0 - 0.5)
            .collect();
        d.insert(QuarterlySeries::new("X", q(2008, 1), x).unwrap()).unwrap();
        d.insert(QuarterlySeries::new("Y", q(2008, 1), y).unwrap()).unwrap();
        fit_ols(&parse_equation("Y C X").unwrap(), &d, None).unwrap()
    }

    #[test]
    fn glejser_zero_when_abs_residuals_flat() {
        // y deviates from the line by exactly +/- c, so |e| is constant
        let mut d = Dataset::new();
        let x: Vec<f64> = (0..20).map(f64::from).collect();
        let y: Vec<f64> = x
            .iter()
            .enumerate()
            .map(|(i, v)| 3.0 * v + if i % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        d.insert(QuarterlySeries::new("X", q(2008, 1), x).unwrap()).unwrap();
        d.insert(QuarterlySeries::new("Y", q(2008, 1), y).unwrap()).unwrap();
        let fit = fit_ols(&parse_equation("Y C X").unwrap(), &d, None).unwrap();
        let rep = glejser(&fit).unwrap();
        let aux = rep.aux.as_ref().unwrap();
        assert!(aux.r_squared.abs() < 1e-6);
        assert!(rep.rows[0].value.abs() < 1e-6);
    }

    #[test]
    fn reset_is_near_zero_for_truly_linear_data() {
        let fit = noisy_fit();
        let rep = ramsey_reset(&fit, 2).unwrap();
        // uniform noise on a linear model: no evidence of curvature expected
        assert!(rep.rows[0].prob > 0.01);
        let aug = rep.aux.as_ref().unwrap();
        assert_eq!(aug.k, 3);
        assert_eq!(aug.rows[2].name, "FITTED^2");
    }

    #[test]
    fn reset_rejects_perfect_fit() {
        let mut d = Dataset::new();
        let x: Vec<f64> = (0..20).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 + 3.0 * v).collect();
        d.insert(QuarterlySeries::new("X", q(2008, 1), x).unwrap()).unwrap();
        d.insert(QuarterlySeries::new("Y", q(2008, 1), y).unwrap()).unwrap();
        let fit = fit_ols(&parse_equation("Y C X").unwrap(), &d, None).unwrap();
        assert!(ramsey_reset(&fit, 2).is_err());
    }

    #[test]
    fn glejser_detects_constructed_heteroskedasticity() {
        // |e| grows linearly in x by construction
        let mut d = Dataset::new();
        let n = 60;
        let x: Vec<f64> = (0..n).map(|i| 1.0 + i as f64).collect();
        let y: Vec<f64> = x
            .iter()
            .enumerate()
            .map(|(i, v)| 2.0 * v + v * if i % 2 == 0 { 0.9 } else { -0.9 })
            .collect();
        d.insert(QuarterlySeries::new("X", q(2008, 1), x).unwrap()).unwrap();
        d.insert(QuarterlySeries::new("Y", q(2008, 1), y).unwrap()).unwrap();
        let fit = fit_ols(&parse_equation("Y C X").unwrap(), &d, None).unwrap();
        let rep = glejser(&fit).unwrap();
        assert!(rep.rows[0].prob < 1e-6, "p = {}", rep.rows[0].prob);
    }
}

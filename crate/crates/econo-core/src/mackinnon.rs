//! Response-surface critical values and approximate p-values for the
//! Dickey-Fuller/Phillips-Perron distribution, single series with constant
//! and no trend.
//!
//! Critical values follow MacKinnon's response-surface regressions
//! `c(p, T) = b_inf + b1/T + b2/T^2 + b3/T^3` (coefficients as distributed
//! with MacKinnon's urcdist and statsmodels). P-values use the companion
//! asymptotic regression surfaces, `p = Phi(polynomial(tau))`, with separate
//! small-p and large-p branches. The finite-sample quantile tables EViews
//! interpolates are not redistributable; against the published tables this
//! approximation agrees to ~1e-2 in p.

use crate::dist::normal_cdf;
use crate::error::{EconoError, Result};

/// `[b_inf, b1, b2, b3]` per significance level, constant / no trend.
const CRIT_1PCT: [f64; 4] = [-3.43035, -6.5393, -16.786, -79.433];
const CRIT_5PCT: [f64; 4] = [-2.86154, -2.8903, -4.234, -40.040];
const CRIT_10PCT: [f64; 4] = [-2.56677, -1.5384, -2.809, 0.0];

/// P-value surface, constant / no trend case.
const TAU_MAX: f64 = 2.74;
const TAU_MIN: f64 = -18.83;
const TAU_STAR: f64 = -1.61;
/// Polynomial in tau for p <= Phi(tau*) (ascending powers).
const SMALL_P: [f64; 3] = [2.1659, 1.4412, 3.8269e-2];
/// Polynomial for the upper branch.
const LARGE_P: [f64; 4] = [1.7339, 9.3202e-1, -1.2745e-1, -1.0368e-2];

fn surface(c: &[f64; 4], t: f64) -> f64 {
    c[0] + c[1] / t + c[2] / (t * t) + c[3] / (t * t * t)
}

/// Finite-sample 1%, 5% and 10% critical values for a test regression with
/// `t_obs` observations.
pub fn critical_values(t_obs: usize) -> Result<(f64, f64, f64)> {
    if t_obs < 20 {
        return Err(EconoError::TooFewObservations { n: t_obs, k: 20 });
    }
    let t = t_obs as f64;
    Ok((surface(&CRIT_1PCT, t), surface(&CRIT_5PCT, t), surface(&CRIT_10PCT, t)))
}

/// Asymptotic critical values (the T -> infinity limit of the surface).
pub fn asymptotic_critical_values() -> (f64, f64, f64) {
    (CRIT_1PCT[0], CRIT_5PCT[0], CRIT_10PCT[0])
}

fn polyval_ascending(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// One-sided (left tail) p-value of the unit-root t-statistic.
pub fn p_value(tau: f64) -> f64 {
    if tau > TAU_MAX {
        return 1.0;
    }
    if tau < TAU_MIN {
        return 0.0;
    }
    let poly = if tau <= TAU_STAR { &SMALL_P[..] } else { &LARGE_P[..] };
    normal_cdf(polyval_ascending(poly, tau)).clamp(0.0, 1.0)
}

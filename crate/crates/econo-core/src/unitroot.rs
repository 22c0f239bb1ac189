//! Phillips-Perron unit-root test with Bartlett-kernel long-run variance,
//! Newey-West automatic bandwidth and residual-based cointegration.

use crate::error::{EconoError, Result};
use crate::linalg;
use crate::mackinnon;
use crate::ols::OlsFit;
use crate::series::QuarterlySeries;
use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bandwidth {
    /// Newey-West (1994) data-dependent selection for the Bartlett kernel.
    AutoNeweyWest,
    Fixed(usize),
}

#[derive(Debug, Clone, Copy)]
pub struct HacConfig {
    pub bandwidth: Bandwidth,
}

impl Default for HacConfig {
    fn default() -> Self {
        Self { bandwidth: Bandwidth::AutoNeweyWest }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Deterministic {
    Constant,
}

#[derive(Debug, Clone)]
pub struct UnitRootReport {
    pub series: String,
    pub adj_t_stat: f64,
    pub p_value: f64,
    pub crit_1: f64,
    pub crit_5: f64,
    pub crit_10: f64,
    /// SSR / T of the test regression ("no correction").
    pub resid_variance: f64,
    /// Bartlett-kernel long-run variance at the bandwidth used.
    pub hac_variance: f64,
    pub bandwidth_used: usize,
    /// Observations in the test regression.
    pub n_used: usize,
    pub deterministic: Deterministic,
}

fn autocovariance(u: &[f64], j: usize) -> f64 {
    let t = u.len() as f64;
    u[j..].iter().zip(u.iter()).map(|(a, b)| a * b).sum::<f64>() / t
}

/// Newey-West (1994) automatic bandwidth for the Bartlett kernel:
/// preliminary truncation `n0 = floor(4 (T/100)^{2/9})`, then
/// `floor(1.1447 ((s1/s0)^2 T)^{1/3})` from the pilot sums.
pub fn newey_west_bandwidth(u: &[f64]) -> Result<usize> {
    let t = u.len();
    if t < 8 {
        return Err(EconoError::TooFewObservations { n: t, k: 8 });
    }
    let g0 = autocovariance(u, 0);
    if g0 <= 0.0 {
        return Err(EconoError::Degenerate("zero-variance residuals".into()));
    }
    let n0 = (4.0 * (t as f64 / 100.0).powf(2.0 / 9.0)).floor() as usize;
    let n0 = n0.min(t - 1);
    let mut s0 = g0;
    let mut s1 = 0.0;
    for j in 1..=n0 {
        let gj = autocovariance(u, j);
        s0 += 2.0 * gj;
        s1 += 2.0 * j as f64 * gj;
    }
    if s0 == 0.0 {
        return Err(EconoError::Degenerate("degenerate pilot long-run variance".into()));
    }
    let gamma_hat = 1.1447 * ((s1 / s0).powi(2) * t as f64).powf(1.0 / 3.0);
    Ok(gamma_hat.floor().max(0.0) as usize)
}

/// Bartlett-weighted long-run variance with `bw` lagged autocovariances
/// (weights `1 - j/(bw+1)`).
pub fn bartlett_long_run_variance(u: &[f64], bw: usize) -> f64 {
    let mut f0 = autocovariance(u, 0);
    for j in 1..=bw.min(u.len().saturating_sub(1)) {
        f0 += 2.0 * (1.0 - j as f64 / (bw as f64 + 1.0)) * autocovariance(u, j);
    }
    f0
}

/// Phillips-Perron test of the null "series has a unit root", test equation
/// with constant. The adjusted statistic is
/// `Z = t_a sqrt(g0/f0) - T (f0 - g0) se(a) / (2 sqrt(f0) s)`.
pub fn phillips_perron(
    series: &QuarterlySeries,
    deterministic: Deterministic,
    hac: &HacConfig,
) -> Result<UnitRootReport> {
    let n = series.len();
    if n < 10 {
        return Err(EconoError::SeriesTooShort { name: series.name().into(), needed: 10, actual: n });
    }
    let vals = series.values();
    let mean = vals.iter().sum::<f64>() / n as f64;
    if vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() <= 0.0 {
        return Err(EconoError::Degenerate("zero-variance series".into()));
    }

    // DF regression: dy_t = c + a * y_{t-1} + u_t
    let t_obs = n - 1;
    let x = DMatrix::from_fn(t_obs, 2, |i, j| if j == 0 { 1.0 } else { vals[i] });
    let y = DVector::from_fn(t_obs, |i, _| vals[i + 1] - vals[i]);
    let names = vec!["C".to_string(), "Y(-1)".to_string()];
    let sol = linalg::lstsq(&x, &y, &names)?;
    let u = sol.residuals.as_slice();
    let t = t_obs as f64;
    let s2 = sol.ssr / (t - 2.0);
    let se_alpha = (s2 * sol.xtx_inv[(1, 1)]).sqrt();
    let t_alpha = sol.beta[1] / se_alpha;

    let g0 = sol.ssr / t;
    if g0 <= 0.0 {
        return Err(EconoError::Degenerate("zero residual variance".into()));
    }
    let bw = match hac.bandwidth {
        Bandwidth::AutoNeweyWest => newey_west_bandwidth(u)?,
        Bandwidth::Fixed(b) => {
            if b >= t_obs {
                return Err(EconoError::InvalidArgument(format!(
                    "bandwidth {b} must be below the sample length {t_obs}"
                )));
            }
            b
        }
    };
    let f0 = bartlett_long_run_variance(u, bw);
    if f0 <= 0.0 {
        return Err(EconoError::Degenerate("long-run variance is not positive".into()));
    }

    let z = t_alpha * (g0 / f0).sqrt() - t * (f0 - g0) * se_alpha / (2.0 * f0.sqrt() * s2.sqrt());
    let (crit_1, crit_5, crit_10) = mackinnon::critical_values(t_obs)?;

    Ok(UnitRootReport {
        series: series.name().to_string(),
        adj_t_stat: z,
        p_value: mackinnon::p_value(z),
        crit_1,
        crit_5,
        crit_10,
        resid_variance: g0,
        hac_variance: f0,
        bandwidth_used: bw,
        n_used: t_obs,
        deterministic,
    })
}

#[derive(Debug, Clone)]
pub struct CointegrationReport {
    pub unit_root: UnitRootReport,
    /// Cointegrated iff the residual unit-root p-value is below 5%.
    pub cointegrated: bool,
}

/// Engle-Granger second step: Phillips-Perron on the residuals of a fitted
/// level regression.
pub fn engle_granger(fit: &OlsFit, hac: &HacConfig) -> Result<CointegrationReport> {
    let resid = QuarterlySeries::new(
        format!("RESID[{}]", fit.summary.dependent),
        fit.design.sample.0,
        fit.residuals.iter().copied().collect(),
    )?;
    let unit_root = phillips_perron(&resid, Deterministic::Constant, hac)?;
    let cointegrated = unit_root.p_value < 0.05;
    Ok(CointegrationReport { unit_root, cointegrated })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::period::QuarterPeriod;

    fn q(y: i32, qt: u8) -> QuarterPeriod {
        QuarterPeriod::new(y, qt).unwrap()
    }

    fn lcg_noise(n: usize, seed: u64) -> Vec<f64> {
        // deterministic uniform-ish noise, good enough for shape tests
        let mut state = seed;
        (0..n)
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((state >> 33) as f64 / (1u64 << 31) as f64) - 1.0
            })
            .collect()
    }

    #[test]
    fn bandwidth_zero_reduces_to_plain_df() {
        let vals = lcg_noise(40, 7);
        let s = QuarterlySeries::new("W", q(2000, 1), vals).unwrap();
        let rep = phillips_perron(
            &s,
            Deterministic::Constant,
            &HacConfig { bandwidth: Bandwidth::Fixed(0) },
        )
        .unwrap();
        // with bw = 0, f0 == g0 and the correction vanishes
        assert!((rep.hac_variance - rep.resid_variance).abs() < 1e-12);
    }

    #[test]
    fn random_walk_is_not_rejected_noise_is() {
        let noise = lcg_noise(120, 42);
        let walk: Vec<f64> = noise
            .iter()
            .scan(0.0, |acc, e| {
                *acc += e;
                Some(*acc)
            })
            .collect();
        let sw = QuarterlySeries::new("RW", q(2000, 1), walk).unwrap();
        let sn = QuarterlySeries::new("N", q(2000, 1), noise).unwrap();
        let rw = phillips_perron(&sw, Deterministic::Constant, &HacConfig::default()).unwrap();
        let white = phillips_perron(&sn, Deterministic::Constant, &HacConfig::default()).unwrap();
        assert!(rw.p_value > 0.05, "random walk p = {}", rw.p_value);
        assert!(white.p_value < 0.01, "white noise p = {}", white.p_value);
    }

    #[test]
    fn long_run_variance_stays_positive() {
        // strongly negatively autocorrelated sequence stresses the kernel sum
        let vals: Vec<f64> = (0..60).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 } * (1.0 + 0.01 * i as f64)).collect();
        for bw in 0..20 {
            let f0 = bartlett_long_run_variance(&vals, bw);
            assert!(f0 > 0.0, "bw {bw} gave {f0}");
        }
    }

    #[test]
    fn degenerate_inputs_error() {
        let s = QuarterlySeries::new("Z", q(2000, 1), vec![5.0; 30]).unwrap();
        assert!(phillips_perron(&s, Deterministic::Constant, &HacConfig::default()).is_err());
        assert!(newey_west_bandwidth(&[0.0; 30]).is_err());
        assert!(newey_west_bandwidth(&[1.0, -1.0]).is_err());
    }

    #[test]
    fn fixed_bandwidth_must_fit_the_sample() {
        let vals = lcg_noise(30, 3);
        let s = QuarterlySeries::new("W", q(2000, 1), vals).unwrap();
        let res = phillips_perron(
            &s,
            Deterministic::Constant,
            &HacConfig { bandwidth: Bandwidth::Fixed(29) },
        );
        assert!(res.is_err());
    }
}

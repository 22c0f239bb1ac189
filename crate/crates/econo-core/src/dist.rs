//! Tail probabilities for the test statistics reported in the tables.

use crate::error::{EconoError, Result};
use statrs::distribution::{ChiSquared, ContinuousCDF, FisherSnedecor, Normal, StudentsT};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailDist {
    StudentT { df: f64 },
    F { df1: f64, df2: f64 },
    ChiSquare { df: f64 },
    Normal,
}

fn check_df(df: f64) -> Result<()> {
    if !(df.is_finite() && df > 0.0) {
        return Err(EconoError::InvalidArgument(format!("degrees of freedom must be positive, got {df}")));
    }
    Ok(())
}

/// Upper-tail probability P(X > stat).
pub fn tail_prob(dist: TailDist, stat: f64) -> Result<f64> {
    if !stat.is_finite() {
        return Err(EconoError::InvalidArgument(format!("statistic must be finite, got {stat}")));
    }
    let p = match dist {
        TailDist::StudentT { df } => {
            check_df(df)?;
            StudentsT::new(0.0, 1.0, df).unwrap().sf(stat)
        }
        TailDist::F { df1, df2 } => {
            check_df(df1)?;
            check_df(df2)?;
            if stat <= 0.0 {
                1.0
            } else {
                FisherSnedecor::new(df1, df2).unwrap().sf(stat)
            }
        }
        TailDist::ChiSquare { df } => {
            check_df(df)?;
            if stat <= 0.0 {
                1.0
            } else {
                ChiSquared::new(df).unwrap().sf(stat)
            }
        }
        TailDist::Normal => Normal::new(0.0, 1.0).unwrap().sf(stat),
    };
    Ok(p.clamp(0.0, 1.0))
}

/// Two-sided p-value for a symmetric statistic (Student-t or normal).
pub fn two_sided(dist: TailDist, stat: f64) -> Result<f64> {
    Ok((2.0 * tail_prob(dist, stat.abs())?).min(1.0))
}

pub fn normal_cdf(x: f64) -> f64 {
    Normal::new(0.0, 1.0).unwrap().cdf(x)
}

/// Upper-tail 5% critical value of a chi-square, by bisection on the sf.
pub fn chi_square_critical(df: f64, alpha: f64) -> f64 {
    let dist = ChiSquared::new(df).unwrap();
    let (mut lo, mut hi) = (0.0, df + 100.0 * df.sqrt() + 100.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if dist.sf(mid) > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn the_paper_p_values_reproduce() {
        // coefficient row: t = 3.752329 on 58 df, two-sided
        let p = two_sided(TailDist::StudentT { df: 58.0 }, 3.752329).unwrap();
        assert!((p - 0.0004).abs() < 5e-5, "{p}");
        // block-exclusion chi-square
        let p = tail_prob(TailDist::ChiSquare { df: 5.0 }, 18.92407).unwrap();
        assert!((p - 0.0020).abs() < 5e-5, "{p}");
        let p = tail_prob(TailDist::ChiSquare { df: 10.0 }, 20.07443).unwrap();
        assert!((p - 0.0286).abs() < 5e-5, "{p}");
        // Glejser F
        let p = tail_prob(TailDist::F { df1: 2.0, df2: 49.0 }, 0.681293).unwrap();
        assert!((p - 0.5107).abs() < 5e-5, "{p}");
    }

    #[test]
    fn one_sided_at_the_median_is_half() {
        assert!((tail_prob(TailDist::StudentT { df: 7.0 }, 0.0).unwrap() - 0.5).abs() < 1e-12);
        assert!((tail_prob(TailDist::Normal, 0.0).unwrap() - 0.5).abs() < 1e-12);
        // F and chi-square medians are not at zero; check monotone envelope instead
        let m = chi_square_critical(3.0, 0.5);
        assert!((tail_prob(TailDist::ChiSquare { df: 3.0 }, m).unwrap() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn t_converges_to_normal_for_large_df() {
        let a = tail_prob(TailDist::StudentT { df: 1.0e6 }, 1.96).unwrap();
        let b = tail_prob(TailDist::Normal, 1.96).unwrap();
        assert!((a - b).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_degrees_of_freedom() {
        assert!(tail_prob(TailDist::StudentT { df: 0.0 }, 1.0).is_err());
        assert!(tail_prob(TailDist::ChiSquare { df: -2.0 }, 1.0).is_err());
        assert!(tail_prob(TailDist::Normal, f64::NAN).is_err());
    }

    #[test]
    fn chi_square_critical_inverts_the_tail() {
        let c = chi_square_critical(9.0, 0.05);
        assert!((tail_prob(TailDist::ChiSquare { df: 9.0 }, c).unwrap() - 0.05).abs() < 1e-9);
        assert!((c - 16.919).abs() < 1e-2);
    }
}

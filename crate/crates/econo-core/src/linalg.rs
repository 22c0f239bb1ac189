//! Least-squares plumbing shared by every estimator.
//!
//! Solves are by orthogonal decomposition (SVD), never by forming and
//! inverting the normal equations; the break-dummy designs put nearly
//! collinear columns next to slow-moving levels and the normal equations
//! square the condition number.

use crate::error::{EconoError, Result};
use nalgebra::{DMatrix, DVector};

/// Singular values below `RANK_TOL * max_sv` count as zero.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Debug)]
pub struct Lstsq {
    pub beta: DVector<f64>,
    pub residuals: DVector<f64>,
    pub fitted: DVector<f64>,
    pub ssr: f64,
    /// (X'X)^-1, from the decomposition.
    pub xtx_inv: DMatrix<f64>,
}

/// Full-rank least squares; errors name the collinear columns otherwise.
pub fn lstsq(x: &DMatrix<f64>, y: &DVector<f64>, names: &[String]) -> Result<Lstsq> {
    let (n, k) = (x.nrows(), x.ncols());
    if n < k {
        return Err(EconoError::TooFewObservations { n, k });
    }
    let svd = x.clone().svd(true, true);
    let max_sv = svd.singular_values.max();
    if !(max_sv > 0.0) {
        return Err(EconoError::RankDeficient(names.to_vec()));
    }
    let tol = RANK_TOL * max_sv;
    if svd.singular_values.iter().any(|s| *s <= tol) {
        return Err(EconoError::RankDeficient(collinear_columns(x, names)));
    }
    let beta = svd.solve(y, tol).map_err(|_| EconoError::Singular("least squares"))?;
    let fitted = x * &beta;
    let residuals = y - &fitted;
    let ssr = residuals.dot(&residuals);

    // (X'X)^-1 = V S^-2 V'
    let v_t = svd.v_t.as_ref().unwrap();
    let mut vs = v_t.transpose();
    for (j, s) in svd.singular_values.iter().enumerate() {
        let inv = 1.0 / s;
        vs.column_mut(j).scale_mut(inv * inv);
    }
    let xtx_inv = &vs * v_t;

    Ok(Lstsq { beta, residuals, fitted, ssr, xtx_inv })
}

/// Greedy forward pass marking the columns that add no rank.
fn collinear_columns(x: &DMatrix<f64>, names: &[String]) -> Vec<String> {
    let mut kept: Vec<usize> = Vec::new();
    let mut flagged = Vec::new();
    for j in 0..x.ncols() {
        let mut trial: Vec<usize> = kept.clone();
        trial.push(j);
        let sub = x.select_columns(trial.iter());
        let svd = sub.clone().svd(false, false);
        let max_sv = svd.singular_values.max();
        let rank = svd
            .singular_values
            .iter()
            .filter(|s| **s > RANK_TOL * max_sv)
            .count();
        if rank == trial.len() {
            kept.push(j);
        } else {
            flagged.push(names.get(j).cloned().unwrap_or_else(|| format!("col{j}")));
        }
    }
    flagged
}

/// Cholesky factor (lower) of a symmetric positive-definite matrix.
pub fn cholesky_lower(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    nalgebra::Cholesky::new(a.clone())
        .map(|c| c.l())
        .ok_or(EconoError::NotPositiveDefinite)
}

/// Eigenvalue moduli of a square (generally non-symmetric) matrix,
/// descending.
pub fn eigen_moduli(a: &DMatrix<f64>) -> Vec<f64> {
    let mut mods: Vec<f64> = a
        .clone()
        .complex_eigenvalues()
        .iter()
        .map(|c| c.norm())
        .collect();
    mods.sort_by(|p, q| q.partial_cmp(p).unwrap());
    mods
}

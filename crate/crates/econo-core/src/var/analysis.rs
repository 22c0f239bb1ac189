//! Stability, Granger block exogeneity, orthogonalized impulse responses and
//! forecast-error variance decomposition of a fitted VAR.

use super::VarModel;
use crate::dist::{tail_prob, TailDist};
use crate::error::{EconoError, Result};
use crate::linalg;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Companion-matrix eigenvalue moduli, descending, and the stability verdict.
pub fn stability_roots(model: &VarModel) -> (Vec<f64>, bool) {
    let k = model.k();
    let p = model.p;
    let dim = k * p;
    let mut companion = DMatrix::zeros(dim, dim);
    for (l, a) in model.a_mats.iter().enumerate() {
        companion.view_mut((0, l * k), (k, k)).copy_from(a);
    }
    for i in k..dim {
        companion[(i, i - k)] = 1.0;
    }
    let moduli = linalg::eigen_moduli(&companion);
    let stable = moduli.first().map_or(true, |m| *m < 1.0);
    (moduli, stable)
}

#[derive(Debug, Clone)]
pub struct GrangerRow {
    pub excluded: String,
    pub chi_sq: f64,
    pub df: usize,
    pub prob: f64,
}

#[derive(Debug, Clone)]
pub struct GrangerReport {
    pub dependent: String,
    pub rows: Vec<GrangerRow>,
    pub all: GrangerRow,
}

/// Wald block-exogeneity tests on the target equation, one block per
/// excluded variable plus the joint "All" row. The coefficient covariance is
/// `sigma_adj[eq] * (X'X)^-1`.
pub fn granger_block_exogeneity(model: &VarModel, target: &str) -> Result<GrangerReport> {
    let eq = model
        .variable_index(target)
        .ok_or_else(|| EconoError::UnknownSeries(target.to_string()))?;
    let beta = model.coef.column(eq);
    let cov = &model.xtx_inv * model.sigma_adj[(eq, eq)];

    let wald = |idx: &[usize]| -> Result<f64> {
        let b = DVector::from_fn(idx.len(), |i, _| beta[idx[i]]);
        let v = DMatrix::from_fn(idx.len(), idx.len(), |i, j| cov[(idx[i], idx[j])]);
        let ch = nalgebra::Cholesky::new(v).ok_or(EconoError::Singular("Wald covariance"))?;
        Ok(b.dot(&ch.solve(&b)))
    };

    let mut rows = Vec::new();
    let mut all_idx = Vec::new();
    for v in 0..model.k() {
        if v == eq {
            continue;
        }
        let idx: Vec<usize> = model.lag_block(v).collect();
        let chi_sq = wald(&idx)?;
        rows.push(GrangerRow {
            excluded: model.variables[v].clone(),
            chi_sq,
            df: idx.len(),
            prob: tail_prob(TailDist::ChiSquare { df: idx.len() as f64 }, chi_sq)?,
        });
        all_idx.extend(idx);
    }
    let chi_sq = wald(&all_idx)?;
    let all = GrangerRow {
        excluded: "All".into(),
        chi_sq,
        df: all_idx.len(),
        prob: tail_prob(TailDist::ChiSquare { df: all_idx.len() as f64 }, chi_sq)?,
    };
    Ok(GrangerReport { dependent: model.variables[eq].clone(), rows, all })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandSpec {
    None,
    /// Coefficient resampling from the asymptotic normal, fixed seed;
    /// replication r draws from ChaCha stream r so results do not depend on
    /// scheduling.
    MonteCarlo { replications: usize, seed: u64 },
}

#[derive(Debug, Clone)]
pub struct ImpulseResponseSet {
    pub horizon: usize,
    /// Shock ordering (a permutation of the model variables).
    pub ordering: Vec<String>,
    /// responses\[h\]\[(i, o)\]: response of variable i (model order) at step
    /// h to a one-standard-deviation shock in ordering position o.
    pub responses: Vec<DMatrix<f64>>,
    /// Two standard deviations of each response cell, when requested.
    pub band_half_width: Option<Vec<DMatrix<f64>>>,
}

fn ordering_permutation(model: &VarModel, ordering: &[String]) -> Result<Vec<usize>> {
    let k = model.k();
    if ordering.len() != k {
        return Err(EconoError::InvalidArgument(format!(
            "ordering must list all {k} variables"
        )));
    }
    let mut perm = Vec::with_capacity(k);
    for name in ordering {
        let idx = model
            .variable_index(name)
            .ok_or_else(|| EconoError::UnknownSeries(name.clone()))?;
        if perm.contains(&idx) {
            return Err(EconoError::InvalidArgument(format!("duplicate variable {name} in ordering")));
        }
        perm.push(idx);
    }
    Ok(perm)
}

/// Impact matrix: rows are model variables, columns ordered shocks.
fn impact_matrix(sigma: &DMatrix<f64>, perm: &[usize]) -> Result<DMatrix<f64>> {
    let k = perm.len();
    let sigma_ord = DMatrix::from_fn(k, k, |a, b| sigma[(perm[a], perm[b])]);
    let l = linalg::cholesky_lower(&sigma_ord)?;
    // undo the row permutation so rows are back in model order
    let mut p0 = DMatrix::zeros(k, k);
    for (pos, var) in perm.iter().enumerate() {
        for o in 0..k {
            p0[(*var, o)] = l[(pos, o)];
        }
    }
    Ok(p0)
}

fn ma_coefficients(a_mats: &[DMatrix<f64>], k: usize, horizon: usize) -> Vec<DMatrix<f64>> {
    let p = a_mats.len();
    let mut psi: Vec<DMatrix<f64>> = Vec::with_capacity(horizon);
    psi.push(DMatrix::identity(k, k));
    for h in 1..horizon {
        let mut m = DMatrix::zeros(k, k);
        for j in 1..=h.min(p) {
            m += &a_mats[j - 1] * &psi[h - j];
        }
        psi.push(m);
    }
    psi
}

/// Cholesky-orthogonalized impulse responses out to `horizon` steps
/// (step 0 is the impact period).
pub fn cholesky_irf(
    model: &VarModel,
    horizon: usize,
    ordering: &[String],
    bands: BandSpec,
) -> Result<ImpulseResponseSet> {
    if horizon == 0 {
        return Err(EconoError::InvalidArgument("horizon must be at least 1".into()));
    }
    let k = model.k();
    let perm = ordering_permutation(model, ordering)?;
    let p0 = impact_matrix(&model.sigma_adj, &perm)?;
    let psi = ma_coefficients(&model.a_mats, k, horizon);
    let responses: Vec<DMatrix<f64>> = psi.iter().map(|m| m * &p0).collect();

    let band_half_width = match bands {
        BandSpec::None => None,
        BandSpec::MonteCarlo { replications, seed } => {
            if replications < 2 {
                return Err(EconoError::InvalidArgument("need at least 2 replications".into()));
            }
            Some(monte_carlo_bands(model, horizon, &p0, replications, seed)?)
        }
    };

    Ok(ImpulseResponseSet {
        horizon,
        ordering: ordering.to_vec(),
        responses,
        band_half_width,
    })
}

/// Std-dev bands by resampling the stacked coefficients from
/// N(vec(B), sigma_adj (x) (X'X)^-1), holding the impact matrix fixed.
fn monte_carlo_bands(
    model: &VarModel,
    horizon: usize,
    p0: &DMatrix<f64>,
    replications: usize,
    seed: u64,
) -> Result<Vec<DMatrix<f64>>> {
    let k = model.k();
    let p = model.p;
    let m = model.m();
    let dim = k * m;
    let cov = model.sigma_adj.kronecker(&model.xtx_inv);
    // tiny ridge: the Kronecker product is PSD but can fail strict Cholesky
    let mut cov_reg = cov;
    let scale = cov_reg.diagonal().amax();
    for i in 0..dim {
        cov_reg[(i, i)] += 1e-12 * scale;
    }
    let chol = linalg::cholesky_lower(&cov_reg)?;

    let mut mean = DVector::zeros(dim);
    for eq in 0..k {
        for r in 0..m {
            mean[eq * m + r] = model.coef[(r, eq)];
        }
    }

    let mut sums = vec![DMatrix::<f64>::zeros(k, k); horizon];
    let mut sq_sums = vec![DMatrix::<f64>::zeros(k, k); horizon];
    for rep in 0..replications {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(rep as u64 + 1);
        let z = DVector::from_fn(dim, |_, _| standard_normal(&mut rng));
        let draw = &mean + &chol * z;
        let mut a_mats = Vec::with_capacity(p);
        for l in 0..p {
            let mut a = DMatrix::zeros(k, k);
            for i in 0..k {
                for j in 0..k {
                    a[(i, j)] = draw[i * m + j * p + l];
                }
            }
            a_mats.push(a);
        }
        let psi = ma_coefficients(&a_mats, k, horizon);
        for h in 0..horizon {
            let resp = &psi[h] * p0;
            for i in 0..k {
                for j in 0..k {
                    sums[h][(i, j)] += resp[(i, j)];
                    sq_sums[h][(i, j)] += resp[(i, j)] * resp[(i, j)];
                }
            }
        }
    }
    let n = replications as f64;
    Ok((0..horizon)
        .map(|h| {
            DMatrix::from_fn(k, k, |i, j| {
                let meanv = sums[h][(i, j)] / n;
                let var = (sq_sums[h][(i, j)] / n - meanv * meanv).max(0.0);
                2.0 * var.sqrt()
            })
        })
        .collect())
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller on open-interval uniforms
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

#[derive(Debug, Clone)]
pub struct FevdRow {
    pub period: usize,
    /// Square root of the total h-step forecast-error variance.
    pub se: f64,
    /// Percentage contribution of each ordered shock; sums to 100.
    pub shares: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct FevdTable {
    pub variable: String,
    pub ordering: Vec<String>,
    pub rows: Vec<FevdRow>,
}

/// Forecast-error variance decomposition of every variable out to `horizon`.
pub fn fevd(model: &VarModel, horizon: usize, ordering: &[String]) -> Result<Vec<FevdTable>> {
    if horizon == 0 {
        return Err(EconoError::InvalidArgument("horizon must be at least 1".into()));
    }
    let k = model.k();
    let perm = ordering_permutation(model, ordering)?;
    let p0 = impact_matrix(&model.sigma_adj, &perm)?;
    let psi = ma_coefficients(&model.a_mats, k, horizon);

    let mut tables: Vec<FevdTable> = model
        .variables
        .iter()
        .map(|v| FevdTable { variable: v.clone(), ordering: ordering.to_vec(), rows: Vec::new() })
        .collect();
    let mut cum = DMatrix::<f64>::zeros(k, k);
    for (h, psi_h) in psi.iter().enumerate() {
        let resp = psi_h * &p0;
        for i in 0..k {
            for j in 0..k {
                cum[(i, j)] += resp[(i, j)] * resp[(i, j)];
            }
        }
        for i in 0..k {
            let total: f64 = (0..k).map(|j| cum[(i, j)]).sum();
            tables[i].rows.push(FevdRow {
                period: h + 1,
                se: total.sqrt(),
                shares: (0..k).map(|j| 100.0 * cum[(i, j)] / total).collect(),
            });
        }
    }
    Ok(tables)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::var::fit_var;
    use crate::var::tests::simulated_dataset;

    fn two_var_model() -> VarModel {
        let d = simulated_dataset(150, 31);
        fit_var(&d, &["A".to_string(), "B".to_string()], 2, None).unwrap()
    }

    #[test]
    fn scalar_companion_root_is_the_coefficient() {
        let d = simulated_dataset(100, 8);
        let model = fit_var(&d, &["A".to_string()], 1, None).unwrap();
        let (moduli, stable) = stability_roots(&model);
        assert_eq!(moduli.len(), 1);
        assert!((moduli[0] - model.a_mats[0][(0, 0)].abs()).abs() < 1e-12);
        assert!(stable);
    }

    #[test]
    fn companion_moduli_solve_the_characteristic_polynomial() {
        // det(I - A1 z - A2 z^2) must vanish at z = 1/lambda for each root
        let model = two_var_model();
        let (moduli, _) = stability_roots(&model);
        let k = model.k();
        let dim = k * model.p;
        let mut companion = DMatrix::zeros(dim, dim);
        for (l, a) in model.a_mats.iter().enumerate() {
            companion.view_mut((0, l * k), (k, k)).copy_from(a);
        }
        for i in k..dim {
            companion[(i, i - k)] = 1.0;
        }
        for lambda in companion.complex_eigenvalues().iter() {
            if lambda.norm() < 1e-8 {
                continue;
            }
            let z = 1.0 / lambda;
            let mut m = DMatrix::<nalgebra::Complex<f64>>::identity(k, k);
            for (l, a) in model.a_mats.iter().enumerate() {
                let zp = z.powu(l as u32 + 1);
                for i in 0..k {
                    for j in 0..k {
                        m[(i, j)] -= a[(i, j)] * zp;
                    }
                }
            }
            let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
            assert!(det.norm() < 1e-8, "det {det:?} at lambda {lambda:?}");
        }
        assert!(!moduli.is_empty());
    }

    #[test]
    fn impact_row_of_first_ordered_variable_is_triangular() {
        let model = two_var_model();
        let ordering = vec!["B".to_string(), "A".to_string()];
        let irf = cholesky_irf(&model, 6, &ordering, BandSpec::None).unwrap();
        let impact = &irf.responses[0];
        // B is first ordered: responds only to its own shock at impact
        let b = 1; // model index of B
        let var_b = model.sigma_adj[(b, b)];
        assert!((impact[(b, 0)] - var_b.sqrt()).abs() < 1e-10);
        assert!(impact[(b, 1)].abs() < 1e-12);
    }

    #[test]
    fn psi_recursion_matches_deterministic_simulation() {
        // propagate a unit innovation through the fitted deterministic VAR
        let model = two_var_model();
        let k = model.k();
        let horizon = 12;
        let psi = ma_coefficients(&model.a_mats, k, horizon);
        for shock in 0..k {
            let mut history: Vec<DVector<f64>> = Vec::new();
            let mut impulse = DVector::zeros(k);
            impulse[shock] = 1.0;
            for h in 0..horizon {
                let mut next = if h == 0 { impulse.clone() } else { DVector::zeros(k) };
                for j in 1..=h.min(model.p) {
                    next += &model.a_mats[j - 1] * &history[h - j];
                }
                for i in 0..k {
                    assert!(
                        (psi[h][(i, shock)] - next[i]).abs() < 1e-10,
                        "h={h} i={i} shock={shock}"
                    );
                }
                history.push(next);
            }
        }
    }

    #[test]
    fn fevd_shares_sum_to_one_hundred_and_first_period_is_own() {
        let model = two_var_model();
        let ordering = vec!["A".to_string(), "B".to_string()];
        let tables = fevd(&model, 10, &ordering).unwrap();
        for t in &tables {
            for row in &t.rows {
                let sum: f64 = row.shares.iter().sum();
                assert!((sum - 100.0).abs() < 1e-6);
                assert!(row.shares.iter().all(|s| (0.0..=100.0 + 1e-9).contains(s)));
            }
        }
        // first-ordered variable at horizon 1: all own variance
        let a_table = tables.iter().find(|t| t.variable == "A").unwrap();
        assert!((a_table.rows[0].shares[0] - 100.0).abs() < 1e-9);
    }

    #[test]
    fn monte_carlo_bands_are_deterministic_for_a_seed() {
        let model = two_var_model();
        let ordering = vec!["A".to_string(), "B".to_string()];
        let spec = BandSpec::MonteCarlo { replications: 50, seed: 42 };
        let a = cholesky_irf(&model, 5, &ordering, spec).unwrap();
        let b = cholesky_irf(&model, 5, &ordering, spec).unwrap();
        let ba = a.band_half_width.unwrap();
        let bb = b.band_half_width.unwrap();
        for (x, y) in ba.iter().zip(&bb) {
            assert_eq!(x, y);
        }
    }

    #[test]
    fn stable_fit_has_decaying_ma_coefficients() {
        let model = two_var_model();
        let (_, stable) = stability_roots(&model);
        assert!(stable);
        let psi = ma_coefficients(&model.a_mats, model.k(), 40);
        assert!(psi[39].amax() < psi[0].amax());
    }
}

//! Design-matrix construction: resolve a specification against a dataset,
//! restrict to the periods where every term (and every AR lag) is available
//! and lay the columns out in specification order.

use super::{EquationSpec, Term};
use crate::error::{EconoError, Result};
use crate::period::QuarterPeriod;
use crate::series::{Dataset, QuarterlySeries};
use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone)]
pub struct Design {
    pub y: DVector<f64>,
    pub x: DMatrix<f64>,
    /// Column names, in specification order.
    pub names: Vec<String>,
    pub dependent_name: String,
    /// Effective sample (inclusive).
    pub sample: (QuarterPeriod, QuarterPeriod),
}

impl Design {
    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn k(&self) -> usize {
        self.x.ncols()
    }
}

fn resolve(term: &Term, data: &Dataset) -> Result<QuarterlySeries> {
    match term {
        Term::Constant => unreachable!("constant resolved inline"),
        Term::Ref { name, lag } => {
            let s = data
                .get(name)
                .ok_or_else(|| EconoError::UnknownSeries(name.clone()))?;
            s.lag(*lag as usize)
        }
        Term::Diff { name, lag } => {
            let s = data
                .get(name)
                .ok_or_else(|| EconoError::UnknownSeries(name.clone()))?;
            s.lag(*lag as usize)?.diff(1)
        }
    }
}

/// Build `(y, X)` over the effective sample, which the AR orders shrink by
/// `max_ar` further leading quarters.
pub fn build_design(
    spec: &EquationSpec,
    data: &Dataset,
    sample: Option<(QuarterPeriod, QuarterPeriod)>,
) -> Result<Design> {
    let (design, presample) = build_design_with_presample(spec, data, sample)?;
    debug_assert_eq!(presample, spec.max_ar_order() as usize);
    Ok(design)
}

/// Like [`build_design`] but the rows start `max_ar` quarters *before* the
/// effective sample, so AR estimators can quasi-difference without further
/// data access. Returns the design plus the number of leading pre-sample
/// rows; `design.sample` describes the effective sample (rows `p..`).
pub fn build_design_with_presample(
    spec: &EquationSpec,
    data: &Dataset,
    sample: Option<(QuarterPeriod, QuarterPeriod)>,
) -> Result<(Design, usize)> {
    let dep = resolve(&spec.dependent, data)?;
    let mut cols: Vec<Option<QuarterlySeries>> = Vec::with_capacity(spec.regressors.len());
    let mut start = dep.start();
    let mut end = dep.end();
    for term in &spec.regressors {
        match term {
            Term::Constant => cols.push(None),
            _ => {
                let s = resolve(term, data)?;
                start = start.max(s.start());
                end = end.min(s.end());
                cols.push(Some(s));
            }
        }
    }
    if let Some((from, to)) = sample {
        start = start.max(from);
        end = end.min(to);
    }
    let p = spec.max_ar_order() as usize;
    let eff_start = start.offset(p as i64);
    if end < eff_start {
        return Err(EconoError::EmptySample);
    }
    let n = (end.quarters_since(&start) + 1) as usize;

    let y = DVector::from_iterator(
        n,
        (0..n as i64).map(|i| dep.value_at(start.offset(i)).unwrap()),
    );
    let k = spec.regressors.len();
    let mut x = DMatrix::zeros(n, k);
    let mut names = Vec::with_capacity(k);
    for (j, (term, series)) in spec.regressors.iter().zip(&cols).enumerate() {
        match series {
            None => {
                x.column_mut(j).fill(1.0);
                names.push("C".to_string());
            }
            Some(s) => {
                for i in 0..n as i64 {
                    x[(i as usize, j)] = s.value_at(start.offset(i)).unwrap();
                }
                names.push(term.to_string());
            }
        }
    }

    Ok((
        Design {
            y,
            x,
            names,
            dependent_name: spec.dependent.to_string(),
            sample: (eff_start, end),
        },
        p,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eqspec::parse_equation;

    fn q(y: i32, qt: u8) -> QuarterPeriod {
        QuarterPeriod::new(y, qt).unwrap()
    }

    fn data() -> Dataset {
        let mut d = Dataset::new();
        d.insert(
            QuarterlySeries::new("Y", q(2008, 1), (0..20).map(f64::from).collect()).unwrap(),
        )
        .unwrap();
        d.insert(
            QuarterlySeries::new("X", q(2008, 1), (0..20).map(|v| f64::from(v * 2)).collect())
                .unwrap(),
        )
        .unwrap();
        d
    }

    #[test]
    fn full_sample_design_with_constant() {
        let spec = parse_equation("Y C X").unwrap();
        let d = build_design(&spec, &data(), None).unwrap();
        assert_eq!(d.n(), 20);
        assert_eq!(d.k(), 2);
        assert_eq!(d.names, vec!["C", "X"]);
        assert!(d.x.column(0).iter().all(|v| *v == 1.0));
        assert_eq!(d.sample.0, q(2008, 1));
    }

    #[test]
    fn lags_and_ar_orders_shrink_the_sample_from_the_front() {
        let spec = parse_equation("Y C X(-2) AR(1)").unwrap();
        let (d, p) = build_design_with_presample(&spec, &data(), None).unwrap();
        assert_eq!(p, 1);
        // lag 2 moves the start to 2008Q3; AR(1) moves the effective start one more
        assert_eq!(d.sample.0, q(2008, 4));
        assert_eq!(d.n(), 18); // includes the one pre-sample row
    }

    #[test]
    fn unresolved_name_is_an_error() {
        let spec = parse_equation("Y C FOO").unwrap();
        assert!(matches!(
            build_design(&spec, &data(), None),
            Err(EconoError::UnknownSeries(n)) if n == "FOO"
        ));
    }

    #[test]
    fn empty_intersection_is_an_error() {
        let spec = parse_equation("Y C X").unwrap();
        let sample = Some((q(2030, 1), q(2031, 1)));
        assert!(matches!(
            build_design(&spec, &data(), sample),
            Err(EconoError::EmptySample)
        ));
    }

    #[test]
    fn difference_dependent() {
        let spec = parse_equation("D(Y) C Y(-1)").unwrap();
        let d = build_design(&spec, &data(), None).unwrap();
        assert_eq!(d.sample.0, q(2008, 2));
        assert_eq!(d.n(), 19);
        // D(Y) of 0,1,2,... is identically 1
        assert!(d.y.iter().all(|v| *v == 1.0));
    }
}

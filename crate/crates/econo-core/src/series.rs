//! Quarterly series container and the deterministic transforms every model
//! in the pipeline is built from: difference, lag, step dummies and the
//! arithmetic-declining distributed-lag aggregate.

use crate::error::{EconoError, Result};
use crate::period::QuarterPeriod;

/// A named, contiguous quarterly sequence of observations.
///
/// Transforms consume observations from the front only; `leading_consumed`
/// accumulates how many were dropped relative to the original source so the
/// adjusted sample of any downstream regression is exact.
#[derive(Debug, Clone, PartialEq)]
pub struct QuarterlySeries {
    name: String,
    start: QuarterPeriod,
    values: Vec<f64>,
    leading_consumed: usize,
}

impl QuarterlySeries {
    pub fn new(name: impl Into<String>, start: QuarterPeriod, values: Vec<f64>) -> Result<Self> {
        let name = name.into();
        if values.is_empty() {
            return Err(EconoError::SeriesTooShort { name, needed: 1, actual: 0 });
        }
        Ok(Self { name, start, values, leading_consumed: 0 })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn start(&self) -> QuarterPeriod {
        self.start
    }

    pub fn end(&self) -> QuarterPeriod {
        self.start.offset(self.values.len() as i64 - 1)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Leading observations consumed by lags/differences since the raw source.
    pub fn leading_consumed(&self) -> usize {
        self.leading_consumed
    }

    pub fn value_at(&self, period: QuarterPeriod) -> Option<f64> {
        let off = period.quarters_since(&self.start);
        if off < 0 {
            return None;
        }
        self.values.get(off as usize).copied()
    }

    pub fn periods(&self) -> impl Iterator<Item = QuarterPeriod> + '_ {
        let start = self.start;
        (0..self.values.len() as i64).map(move |i| start.offset(i))
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Slice to `[from, to]`, inclusive on both ends.
    pub fn slice(&self, from: QuarterPeriod, to: QuarterPeriod) -> Result<Self> {
        let a = from.quarters_since(&self.start);
        let b = to.quarters_since(&self.start);
        if a < 0 || b >= self.values.len() as i64 || a > b {
            return Err(EconoError::EmptySample);
        }
        Ok(Self {
            name: self.name.clone(),
            start: from,
            values: self.values[a as usize..=b as usize].to_vec(),
            leading_consumed: self.leading_consumed + a as usize,
        })
    }

    /// `order`-th difference; the start advances by `order` quarters.
    pub fn diff(&self, order: usize) -> Result<Self> {
        if self.values.len() <= order {
            return Err(EconoError::SeriesTooShort {
                name: self.name.clone(),
                needed: order + 1,
                actual: self.values.len(),
            });
        }
        let mut v = self.values.clone();
        for _ in 0..order {
            v = v.windows(2).map(|w| w[1] - w[0]).collect();
        }
        Ok(Self {
            name: format!("D({})", self.name),
            start: self.start.offset(order as i64),
            values: v,
            leading_consumed: self.leading_consumed + order,
        })
    }

    /// Value at t becomes the value at t-k; `lag(s, 0)` is the identity.
    pub fn lag(&self, k: usize) -> Result<Self> {
        if k == 0 {
            return Ok(self.clone());
        }
        if self.values.len() <= k {
            return Err(EconoError::SeriesTooShort {
                name: self.name.clone(),
                needed: k + 1,
                actual: self.values.len(),
            });
        }
        let n = self.values.len() - k;
        Ok(Self {
            name: format!("{}(-{})", self.name, k),
            start: self.start.offset(k as i64),
            values: self.values[..n].to_vec(),
            leading_consumed: self.leading_consumed + k,
        })
    }

    /// Arithmetic-declining distributed-lag aggregate:
    /// `Z_t = sum_{i=0..L} (L+1-i) * x_{t-i}`; the start advances by L.
    pub fn fisher_z(&self, lag_depth: usize) -> Result<Self> {
        let l = lag_depth;
        if self.values.len() <= l {
            return Err(EconoError::SeriesTooShort {
                name: self.name.clone(),
                needed: l + 1,
                actual: self.values.len(),
            });
        }
        let values = (l..self.values.len())
            .map(|t| {
                (0..=l)
                    .map(|i| (l + 1 - i) as f64 * self.values[t - i])
                    .sum()
            })
            .collect();
        Ok(Self {
            name: format!("Z{}", self.name),
            start: self.start.offset(l as i64),
            values,
            leading_consumed: self.leading_consumed + l,
        })
    }
}

/// Step dummy over an inclusive period span: 0 before `break_at`, 1 from
/// `break_at` on.
pub fn step_dummy(
    name: impl Into<String>,
    range: (QuarterPeriod, QuarterPeriod),
    break_at: QuarterPeriod,
) -> Result<QuarterlySeries> {
    let (start, end) = range;
    if break_at < start || break_at > end {
        return Err(EconoError::BreakOutsideRange(break_at.to_string()));
    }
    let n = end.quarters_since(&start) + 1;
    let values = (0..n)
        .map(|i| if start.offset(i) >= break_at { 1.0 } else { 0.0 })
        .collect();
    QuarterlySeries::new(name, start, values)
}

/// A named collection of series sharing (for raw data) one common range.
#[derive(Debug, Clone, Default)]
pub struct Dataset {
    series: Vec<QuarterlySeries>,
}

impl Dataset {
    pub fn new() -> Self {
        Self::default()
    }

    /// Insert a series; names collide case-insensitively.
    pub fn insert(&mut self, s: QuarterlySeries) -> Result<()> {
        if self.get(s.name()).is_some() {
            return Err(EconoError::DuplicateSeries(s.name().to_string()));
        }
        self.series.push(s);
        Ok(())
    }

    pub fn replace(&mut self, s: QuarterlySeries) {
        if let Some(old) = self
            .series
            .iter_mut()
            .find(|t| t.name().eq_ignore_ascii_case(s.name()))
        {
            *old = s;
        } else {
            self.series.push(s);
        }
    }

    pub fn get(&self, name: &str) -> Option<&QuarterlySeries> {
        self.series.iter().find(|s| s.name().eq_ignore_ascii_case(name))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.series.iter().map(|s| s.name())
    }

    pub fn len(&self) -> usize {
        self.series.len()
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }

    /// Common range of the raw (equal-span) series; None when empty.
    pub fn range(&self) -> Option<(QuarterPeriod, QuarterPeriod)> {
        let first = self.series.first()?;
        Some((first.start(), first.end()))
    }
}

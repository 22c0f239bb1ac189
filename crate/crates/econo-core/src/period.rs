use crate::error::{EconoError, Result};
use std::fmt;
use std::str::FromStr;

/// A calendar quarter, ordered chronologically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QuarterPeriod {
    year: i32,
    quarter: u8,
}

impl QuarterPeriod {
    pub fn new(year: i32, quarter: u8) -> Result<Self> {
        if !(1..=4).contains(&quarter) {
            return Err(EconoError::InvalidPeriod(format!("{year}Q{quarter}")));
        }
        Ok(Self { year, quarter })
    }

    pub fn year(&self) -> i32 {
        self.year
    }

    pub fn quarter(&self) -> u8 {
        self.quarter
    }

    /// Quarters since 0Q1; the series index space.
    pub fn index(&self) -> i64 {
        self.year as i64 * 4 + (self.quarter as i64 - 1)
    }

    pub fn from_index(idx: i64) -> Self {
        Self {
            year: idx.div_euclid(4) as i32,
            quarter: (idx.rem_euclid(4) + 1) as u8,
        }
    }

    pub fn offset(&self, quarters: i64) -> Self {
        Self::from_index(self.index() + quarters)
    }

    pub fn next(&self) -> Self {
        self.offset(1)
    }

    /// Quarters from `other` to `self`.
    pub fn quarters_since(&self, other: &QuarterPeriod) -> i64 {
        self.index() - other.index()
    }
}

impl fmt::Display for QuarterPeriod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}Q{}", self.year, self.quarter)
    }
}

/// Accepts "2008Q1" and the dataset's Spanish month labels: quarter-end
/// months ("mar.2008", jun, sep, dic) and quarter-start months (ene, abr,
/// jul, oct).
impl FromStr for QuarterPeriod {
    type Err = EconoError;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let bad = || EconoError::InvalidPeriod(t.to_string());
        if let Some((y, q)) = split_quarter_form(t) {
            return QuarterPeriod::new(y, q);
        }
        if let Some((mon, yr)) = t.split_once('.') {
            let quarter = match mon.to_ascii_lowercase().as_str() {
                "mar" | "ene" => 1,
                "jun" | "abr" => 2,
                "sep" | "jul" => 3,
                "dic" | "oct" => 4,
                _ => return Err(bad()),
            };
            let year: i32 = yr.parse().map_err(|_| bad())?;
            return QuarterPeriod::new(year, quarter);
        }
        Err(bad())
    }
}

fn split_quarter_form(t: &str) -> Option<(i32, u8)> {
    let pos = t.find(['Q', 'q'])?;
    let year: i32 = t[..pos].parse().ok()?;
    let quarter: u8 = t[pos + 1..].parse().ok()?;
    Some((year, quarter))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_is_chronological() {
        let a = QuarterPeriod::new(2008, 4).unwrap();
        let b = QuarterPeriod::new(2009, 1).unwrap();
        assert!(a < b);
        assert_eq!(a.next(), b);
        assert_eq!(b.quarters_since(&a), 1);
    }

    #[test]
    fn rejects_quarter_out_of_range() {
        assert!(QuarterPeriod::new(2008, 0).is_err());
        assert!(QuarterPeriod::new(2008, 5).is_err());
    }

    #[test]
    fn parses_both_period_formats() {
        let q1: QuarterPeriod = "2008Q1".parse().unwrap();
        assert_eq!(q1, QuarterPeriod::new(2008, 1).unwrap());
        let m: QuarterPeriod = "mar.2008".parse().unwrap();
        assert_eq!(m, q1);
        let d: QuarterPeriod = "dic.2022".parse().unwrap();
        assert_eq!(d, QuarterPeriod::new(2022, 4).unwrap());
        let s: QuarterPeriod = "abr.2010".parse().unwrap();
        assert_eq!(s, QuarterPeriod::new(2010, 2).unwrap());
        assert!("foo.2008".parse::<QuarterPeriod>().is_err());
        assert!("2008Q9".parse::<QuarterPeriod>().is_err());
    }

    #[test]
    fn offset_round_trips_across_year_boundaries() {
        let p = QuarterPeriod::new(2010, 1).unwrap();
        assert_eq!(p.offset(-1), QuarterPeriod::new(2009, 4).unwrap());
        assert_eq!(p.offset(4), QuarterPeriod::new(2011, 1).unwrap());
        assert_eq!(QuarterPeriod::from_index(p.index()), p);
    }
}

//! Dataset ingestion from delimiter-separated text.
//!
//! The file contract: UTF-8, one header row, period column first, one column
//! per series. Periods accept "2008Q1" and Spanish month labels ("mar.2008").
//! The numeric locale is declared by the caller, never sniffed: silently
//! reading "24.088" as 24.088 instead of 24088 would corrupt every result
//! downstream.

use crate::error::{EconoError, Result};
use crate::period::QuarterPeriod;
use crate::series::{Dataset, QuarterlySeries};
use std::path::Path;

/// Decimal-separator convention of the input file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NumericLocale {
    /// "24.088,41" = 24088.41 (dot thousands, comma decimal).
    CommaDecimal,
    /// "24,088.41" = 24088.41 (comma thousands, dot decimal).
    PointDecimal,
}

impl NumericLocale {
    pub fn default_delimiter(self) -> char {
        match self {
            NumericLocale::CommaDecimal => ';',
            NumericLocale::PointDecimal => ',',
        }
    }

    fn decimal(self) -> char {
        match self {
            NumericLocale::CommaDecimal => ',',
            NumericLocale::PointDecimal => '.',
        }
    }

    fn thousands(self) -> char {
        match self {
            NumericLocale::CommaDecimal => '.',
            NumericLocale::PointDecimal => ',',
        }
    }
}

/// Parse one numeric cell under the locale.
pub fn parse_number(cell: &str, locale: NumericLocale) -> Option<f64> {
    let mut t = cell.trim();
    if t.is_empty() {
        return None;
    }
    let mut out = String::with_capacity(t.len() + 1);
    if let Some(rest) = t.strip_prefix(['-', '+']) {
        out.push(if cell.trim().starts_with('-') { '-' } else { '+' });
        t = rest;
    }
    let (int_part, frac_part) = match t.split_once(locale.decimal()) {
        Some((i, f)) => (i, Some(f)),
        None => (t, None),
    };
    // grouping separators must split the integer part into a leading group
    // of 1..=3 digits followed by groups of exactly 3
    let groups: Vec<&str> = int_part.split(locale.thousands()).collect();
    for (g_idx, g) in groups.iter().enumerate() {
        if g.is_empty() || !g.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        if g_idx == 0 {
            if groups.len() > 1 && g.len() > 3 {
                return None;
            }
        } else if g.len() != 3 {
            return None;
        }
        out.push_str(g);
    }
    if let Some(f) = frac_part {
        if f.is_empty() || !f.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        out.push('.');
        out.push_str(f);
    }
    out.parse().ok()
}

/// Format a value so that reparsing under the same locale returns it exactly.
pub fn format_number(value: f64, locale: NumericLocale) -> String {
    let plain = format!("{value}");
    match locale {
        NumericLocale::PointDecimal => plain,
        NumericLocale::CommaDecimal => plain.replace('.', ","),
    }
}

pub fn load_dataset(path: impl AsRef<Path>, locale: NumericLocale) -> Result<Dataset> {
    let text = std::fs::read_to_string(path)?;
    load_dataset_str(&text, locale, locale.default_delimiter())
}

pub fn load_dataset_with_delimiter(
    path: impl AsRef<Path>,
    locale: NumericLocale,
    delimiter: char,
) -> Result<Dataset> {
    let text = std::fs::read_to_string(path)?;
    load_dataset_str(&text, locale, delimiter)
}

/// Parse a whole dataset from text. Rows are 1-based, the header is row 1;
/// columns are 1-based with the period column first.
pub fn load_dataset_str(text: &str, locale: NumericLocale, delimiter: char) -> Result<Dataset> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());

    let (_, header) = lines.next().ok_or(EconoError::EmptySample)?;
    let header_cells: Vec<&str> = header.split(delimiter).map(str::trim).collect();
    if header_cells.len() < 2 {
        return Err(EconoError::Degenerate(
            "header must name a period column and at least one series".into(),
        ));
    }
    let names: Vec<String> = header_cells[1..].iter().map(|s| s.to_string()).collect();
    for (i, a) in names.iter().enumerate() {
        if a.is_empty() {
            return Err(EconoError::Degenerate(format!("empty series name in column {}", i + 2)));
        }
        if names[..i].iter().any(|b| b.eq_ignore_ascii_case(a)) {
            return Err(EconoError::DuplicateSeries(a.clone()));
        }
    }

    let mut start: Option<QuarterPeriod> = None;
    let mut expected: Option<QuarterPeriod> = None;
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); names.len()];

    for (line_idx, line) in lines {
        let row = line_idx + 1;
        let cells: Vec<&str> = line.split(delimiter).map(str::trim).collect();
        if cells.len() != names.len() + 1 {
            return Err(EconoError::Degenerate(format!(
                "row {row}: expected {} cells, found {}",
                names.len() + 1,
                cells.len()
            )));
        }
        let period: QuarterPeriod = cells[0].parse()?;
        match expected {
            None => start = Some(period),
            Some(e) if e != period => {
                return Err(EconoError::NonContiguousPeriods {
                    row,
                    expected: e.to_string(),
                    found: period.to_string(),
                })
            }
            _ => {}
        }
        expected = Some(period.next());
        for (j, cell) in cells[1..].iter().enumerate() {
            let v = parse_number(cell, locale).ok_or_else(|| EconoError::MalformedCell {
                row,
                col: j + 2,
                cell: cell.to_string(),
            })?;
            columns[j].push(v);
        }
    }

    let start = start.ok_or(EconoError::EmptySample)?;
    let mut ds = Dataset::new();
    for (name, values) in names.into_iter().zip(columns) {
        ds.insert(QuarterlySeries::new(name, start, values)?)?;
    }
    Ok(ds)
}

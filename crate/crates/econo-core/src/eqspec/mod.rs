//! Equation-specification mini-language.
//!
//! A specification is a whitespace-separated list of terms: the first is the
//! dependent variable, the rest are regressors. `C` is the constant, `AR(n)`
//! declares an autoregressive error term, `X(-k)` a lag and `D(X)` a first
//! difference. Identifiers are `[A-Za-z_][A-Za-z0-9_]*`, case-insensitive.

mod design;
mod genr;

pub use design::{build_design, build_design_with_presample, Design};
pub use genr::{apply_genr, eval_genr, parse_genr, GenrExpr};

use crate::error::{EconoError, Result};
use std::fmt;

/// One term of a specification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Constant,
    /// `X` or `X(-k)`, k >= 1.
    Ref { name: String, lag: u32 },
    /// `D(X)` or `D(X(-k))`: first difference of a (possibly lagged) series.
    Diff { name: String, lag: u32 },
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Constant => write!(f, "C"),
            Term::Ref { name, lag: 0 } => write!(f, "{name}"),
            Term::Ref { name, lag } => write!(f, "{name}(-{lag})"),
            Term::Diff { name, lag: 0 } => write!(f, "D({name})"),
            Term::Diff { name, lag } => write!(f, "D({name}(-{lag}))"),
        }
    }
}

/// Parsed regression specification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquationSpec {
    pub dependent: Term,
    pub regressors: Vec<Term>,
    /// Autoregressive error orders, sorted and unique.
    pub ar_orders: Vec<u32>,
}

impl EquationSpec {
    pub fn has_constant(&self) -> bool {
        self.regressors.iter().any(|t| *t == Term::Constant)
    }

    pub fn max_ar_order(&self) -> u32 {
        self.ar_orders.last().copied().unwrap_or(0)
    }

    /// Drop the AR terms, keeping the structural part.
    pub fn without_ar(&self) -> Self {
        Self {
            dependent: self.dependent.clone(),
            regressors: self.regressors.clone(),
            ar_orders: Vec::new(),
        }
    }
}

impl fmt::Display for EquationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.dependent)?;
        for t in &self.regressors {
            write!(f, " {t}")?;
        }
        for n in &self.ar_orders {
            write!(f, " AR({n})")?;
        }
        Ok(())
    }
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Parse `NAME` or `NAME(-k)`; `col` is the token's 1-based column for errors.
fn parse_ref(tok: &str, col: usize) -> Result<(String, u32)> {
    let err = |msg: &str| EconoError::Parse { col, msg: msg.to_string() };
    if let Some(open) = tok.find('(') {
        let name = &tok[..open];
        let rest = &tok[open + 1..];
        let inner = rest
            .strip_suffix(')')
            .ok_or_else(|| err("missing closing parenthesis"))?;
        let lag_str = inner
            .strip_prefix('-')
            .ok_or_else(|| err("lag must be negative, e.g. X(-1)"))?;
        let lag: u32 = lag_str
            .parse()
            .map_err(|_| err("malformed lag"))?;
        if lag == 0 {
            return Err(err("lag must be at least 1"));
        }
        if !is_ident(name) {
            return Err(err("invalid identifier"));
        }
        Ok((name.to_ascii_uppercase(), lag))
    } else {
        if !is_ident(tok) {
            return Err(err("invalid identifier"));
        }
        Ok((tok.to_ascii_uppercase(), 0))
    }
}

fn parse_term(tok: &str, col: usize) -> Result<Term> {
    let err = |msg: &str| EconoError::Parse { col, msg: msg.to_string() };
    let upper = tok.to_ascii_uppercase();
    if upper == "C" {
        return Ok(Term::Constant);
    }
    if let Some(inner) = strip_func(&upper, "D") {
        let (name, lag) = parse_ref(inner, col)?;
        return Ok(Term::Diff { name, lag });
    }
    if upper.starts_with("AR(") {
        return Err(err("AR terms are not ordinary regressors here"));
    }
    let (name, lag) = parse_ref(&upper, col)?;
    Ok(Term::Ref { name, lag })
}

fn strip_func<'a>(tok: &'a str, func: &str) -> Option<&'a str> {
    tok.strip_prefix(func)?
        .strip_prefix('(')?
        .strip_suffix(')')
}

/// Parse a full equation specification string.
pub fn parse_equation(text: &str) -> Result<EquationSpec> {
    let mut tokens = tokenize(text);
    let (first, col) = tokens
        .next()
        .ok_or_else(|| EconoError::Parse { col: 1, msg: "empty specification".into() })?;
    let dependent = parse_term(first, col)?;
    if dependent == Term::Constant {
        return Err(EconoError::Parse { col, msg: "dependent variable cannot be the constant".into() });
    }

    let mut regressors = Vec::new();
    let mut ar_orders: Vec<u32> = Vec::new();
    let mut seen_constant = false;
    for (tok, col) in tokens {
        let upper = tok.to_ascii_uppercase();
        if let Some(inner) = strip_func(&upper, "AR") {
            let err = |msg: &str| EconoError::Parse { col, msg: msg.to_string() };
            let n: u32 = inner.parse().map_err(|_| err("malformed AR order"))?;
            if n == 0 {
                return Err(err("AR(0) is not a valid error order"));
            }
            if ar_orders.contains(&n) {
                return Err(err("duplicate AR order"));
            }
            ar_orders.push(n);
            continue;
        }
        let term = parse_term(tok, col)?;
        if term == Term::Constant {
            if seen_constant {
                return Err(EconoError::Parse { col, msg: "duplicate constant term".into() });
            }
            seen_constant = true;
        }
        regressors.push(term);
    }
    ar_orders.sort_unstable();
    Ok(EquationSpec { dependent, regressors, ar_orders })
}

fn tokenize(text: &str) -> impl Iterator<Item = (&str, usize)> {
    text.split_whitespace().map(move |tok| {
        let col = tok.as_ptr() as usize - text.as_ptr() as usize + 1;
        (tok, col)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_baseline_specification() {
        let eq = parse_equation("PIB C CAPITALFIJO IED").unwrap();
        assert_eq!(eq.dependent, Term::Ref { name: "PIB".into(), lag: 0 });
        assert_eq!(
            eq.regressors,
            vec![
                Term::Constant,
                Term::Ref { name: "CAPITALFIJO".into(), lag: 0 },
                Term::Ref { name: "IED".into(), lag: 0 },
            ]
        );
        assert!(eq.ar_orders.is_empty());
    }

    #[test]
    fn collects_ar_orders() {
        let eq = parse_equation("PIB C ZCF ZIED AR(1) AR(2)").unwrap();
        assert_eq!(eq.ar_orders, vec![1, 2]);
        assert_eq!(eq.regressors.len(), 3);
    }

    #[test]
    fn minimal_constant_only_spec() {
        let eq = parse_equation("Y C").unwrap();
        assert_eq!(eq.regressors, vec![Term::Constant]);
    }

    #[test]
    fn lag_and_difference_terms() {
        let eq = parse_equation("D(PIB) C PIB(-1) D(CF(-2))").unwrap();
        assert_eq!(eq.dependent, Term::Diff { name: "PIB".into(), lag: 0 });
        assert_eq!(eq.regressors[1], Term::Ref { name: "PIB".into(), lag: 1 });
        assert_eq!(eq.regressors[2], Term::Diff { name: "CF".into(), lag: 2 });
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_equation("").is_err());
        assert!(parse_equation("   ").is_err());
        assert!(parse_equation("Y X(-0)").is_err());
        assert!(parse_equation("Y X(1)").is_err());
        assert!(parse_equation("Y X(-").is_err());
        assert!(parse_equation("Y AR(0)").is_err());
        assert!(parse_equation("Y AR(1) AR(1)").is_err());
        assert!(parse_equation("C X").is_err());
        assert!(parse_equation("Y C C").is_err());
        assert!(parse_equation("Y 9X").is_err());
    }

    #[test]
    fn parse_print_parse_is_a_fixed_point() {
        for s in [
            "PIB C CAPITALFIJO IED",
            "pib c zcf zied ar(2) ar(1)",
            "D(PIB) C PIB(-1) D(CF(-2)) AR(1)",
            "Y C",
        ] {
            let once = parse_equation(s).unwrap();
            let twice = parse_equation(&once.to_string()).unwrap();
            assert_eq!(once, twice);
            assert_eq!(once.to_string(), twice.to_string());
        }
    }
}

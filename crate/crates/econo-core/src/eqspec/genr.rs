//! GENR series-generation expressions: `NAME = expr` where `expr` is
//! arithmetic over series references (with lags), numeric literals and
//! parentheses. Evaluation aligns every reference by period; the result's
//! start reflects the deepest lag used.

use super::parse_ref;
use crate::error::{EconoError, Result};
use crate::period::QuarterPeriod;
use crate::series::{Dataset, QuarterlySeries};

#[derive(Debug, Clone, PartialEq)]
pub enum GenrExpr {
    Number(f64),
    Ref { name: String, lag: u32 },
    Diff { name: String, lag: u32 },
    Neg(Box<GenrExpr>),
    Add(Box<GenrExpr>, Box<GenrExpr>),
    Sub(Box<GenrExpr>, Box<GenrExpr>),
    Mul(Box<GenrExpr>, Box<GenrExpr>),
    Div(Box<GenrExpr>, Box<GenrExpr>),
}

impl std::fmt::Display for GenrExpr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GenrExpr::Number(v) => write!(f, "{v}"),
            GenrExpr::Ref { name, lag: 0 } => write!(f, "{name}"),
            GenrExpr::Ref { name, lag } => write!(f, "{name}(-{lag})"),
            GenrExpr::Diff { name, lag: 0 } => write!(f, "D({name})"),
            GenrExpr::Diff { name, lag } => write!(f, "D({name}(-{lag}))"),
            GenrExpr::Neg(e) => write!(f, "-({e})"),
            GenrExpr::Add(a, b) => write!(f, "({a} + {b})"),
            GenrExpr::Sub(a, b) => write!(f, "({a} - {b})"),
            GenrExpr::Mul(a, b) => write!(f, "({a} * {b})"),
            GenrExpr::Div(a, b) => write!(f, "({a} / {b})"),
        }
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    Eof,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Self { src: src.as_bytes(), pos: 0 }
    }

    /// 1-based column of the cursor.
    fn col(&self) -> usize {
        self.pos + 1
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn next(&mut self) -> Result<(Tok, usize)> {
        self.skip_ws();
        let col = self.col();
        if self.pos >= self.src.len() {
            return Ok((Tok::Eof, col));
        }
        let c = self.src[self.pos];
        let tok = match c {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' | b'.' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.')
                {
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let v: f64 = text.parse().map_err(|_| EconoError::Parse {
                    col,
                    msg: format!("malformed number {text:?}"),
                })?;
                return Ok((Tok::Num(v), col));
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                return Ok((Tok::Ident(name.to_ascii_uppercase()), col));
            }
            other => {
                return Err(EconoError::Parse {
                    col,
                    msg: format!("unexpected character {:?}", other as char),
                })
            }
        };
        self.pos += 1;
        Ok((tok, col))
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    peeked: Option<(Tok, usize)>,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Self { lexer: Lexer::new(src), peeked: None }
    }

    fn peek(&mut self) -> Result<&(Tok, usize)> {
        if self.peeked.is_none() {
            self.peeked = Some(self.lexer.next()?);
        }
        Ok(self.peeked.as_ref().unwrap())
    }

    fn bump(&mut self) -> Result<(Tok, usize)> {
        match self.peeked.take() {
            Some(t) => Ok(t),
            None => self.lexer.next(),
        }
    }

    fn expr(&mut self) -> Result<GenrExpr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek()?.0 {
                Tok::Plus => {
                    self.bump()?;
                    lhs = GenrExpr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump()?;
                    lhs = GenrExpr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<GenrExpr> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek()?.0 {
                Tok::Star => {
                    self.bump()?;
                    lhs = GenrExpr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Tok::Slash => {
                    self.bump()?;
                    lhs = GenrExpr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<GenrExpr> {
        let (tok, col) = self.bump()?;
        match tok {
            Tok::Num(v) => Ok(GenrExpr::Number(v)),
            Tok::Minus => Ok(GenrExpr::Neg(Box::new(self.factor()?))),
            Tok::LParen => {
                let inner = self.expr()?;
                let (close, ccol) = self.bump()?;
                if close != Tok::RParen {
                    return Err(EconoError::Parse { col: ccol, msg: "expected ')'".into() });
                }
                Ok(inner)
            }
            Tok::Ident(name) => self.reference(name, col),
            other => Err(EconoError::Parse {
                col,
                msg: format!("expected a value, found {other:?}"),
            }),
        }
    }

    /// An identifier, optionally followed by `(-k)`; `D(...)` wraps a ref.
    fn reference(&mut self, name: String, col: usize) -> Result<GenrExpr> {
        let is_diff = name == "D" && matches!(self.peek()?.0, Tok::LParen);
        if is_diff {
            self.bump()?; // (
            let (tok, icol) = self.bump()?;
            let inner = match tok {
                Tok::Ident(n) => n,
                _ => return Err(EconoError::Parse { col: icol, msg: "expected series name".into() }),
            };
            let lag = self.optional_lag()?;
            let (close, ccol) = self.bump()?;
            if close != Tok::RParen {
                return Err(EconoError::Parse { col: ccol, msg: "expected ')'".into() });
            }
            return Ok(GenrExpr::Diff { name: inner, lag });
        }
        let lag = self.optional_lag()?;
        Ok(GenrExpr::Ref { name: parse_ref(&name, col)?.0, lag })
    }

    /// Parses `(-k)` after an identifier if present; anything else is left
    /// for the caller (an opening paren not followed by `-int)` would be a
    /// multiplication-style syntax error later, matching the grammar).
    fn optional_lag(&mut self) -> Result<u32> {
        if self.peek()?.0 != Tok::LParen {
            return Ok(0);
        }
        self.bump()?; // (
        let (tok, col) = self.bump()?;
        if tok != Tok::Minus {
            return Err(EconoError::Parse { col, msg: "expected '-' in lag".into() });
        }
        let (tok, col) = self.bump()?;
        let lag = match tok {
            Tok::Num(v) if v.fract() == 0.0 && v >= 1.0 => v as u32,
            _ => return Err(EconoError::Parse { col, msg: "lag must be a positive integer".into() }),
        };
        let (close, ccol) = self.bump()?;
        if close != Tok::RParen {
            return Err(EconoError::Parse { col: ccol, msg: "expected ')'".into() });
        }
        Ok(lag)
    }
}

/// Parse a `NAME = expr` generation line.
pub fn parse_genr(text: &str) -> Result<(String, GenrExpr)> {
    let eq_pos = text.find('=').ok_or_else(|| EconoError::Parse {
        col: text.len() + 1,
        msg: "expected NAME = expr".into(),
    })?;
    let name_part = text[..eq_pos].trim();
    if !super::is_ident(name_part) {
        return Err(EconoError::Parse { col: 1, msg: "invalid target name".into() });
    }
    let rhs = &text[eq_pos + 1..];
    let mut parser = Parser::new(rhs);
    let expr = parser.expr().map_err(|e| shift_col(e, eq_pos + 1))?;
    let (tok, col) = parser.bump().map_err(|e| shift_col(e, eq_pos + 1))?;
    if tok != Tok::Eof {
        return Err(EconoError::Parse {
            col: col + eq_pos + 1,
            msg: format!("unexpected trailing input {tok:?}"),
        });
    }
    Ok((name_part.to_ascii_uppercase(), expr))
}

fn shift_col(e: EconoError, by: usize) -> EconoError {
    match e {
        EconoError::Parse { col, msg } => EconoError::Parse { col: col + by, msg },
        other => other,
    }
}

enum Value {
    Scalar(f64),
    Series { start: QuarterPeriod, values: Vec<f64> },
}

fn combine(a: Value, b: Value, f: impl Fn(f64, f64) -> f64) -> Result<Value> {
    match (a, b) {
        (Value::Scalar(x), Value::Scalar(y)) => Ok(Value::Scalar(f(x, y))),
        (Value::Scalar(x), Value::Series { start, values }) => Ok(Value::Series {
            start,
            values: values.into_iter().map(|v| f(x, v)).collect(),
        }),
        (Value::Series { start, values }, Value::Scalar(y)) => Ok(Value::Series {
            start,
            values: values.into_iter().map(|v| f(v, y)).collect(),
        }),
        (Value::Series { start: s1, values: v1 }, Value::Series { start: s2, values: v2 }) => {
            let start = s1.max(s2);
            let end1 = s1.offset(v1.len() as i64 - 1);
            let end2 = s2.offset(v2.len() as i64 - 1);
            let end = end1.min(end2);
            if end < start {
                return Err(EconoError::EmptySample);
            }
            let n = (end.quarters_since(&start) + 1) as usize;
            let o1 = start.quarters_since(&s1) as usize;
            let o2 = start.quarters_since(&s2) as usize;
            let values = (0..n).map(|i| f(v1[o1 + i], v2[o2 + i])).collect();
            Ok(Value::Series { start, values })
        }
    }
}

fn eval(expr: &GenrExpr, data: &Dataset) -> Result<Value> {
    match expr {
        GenrExpr::Number(v) => Ok(Value::Scalar(*v)),
        GenrExpr::Ref { name, lag } => {
            let s = data
                .get(name)
                .ok_or_else(|| EconoError::UnknownSeries(name.clone()))?
                .lag(*lag as usize)?;
            Ok(Value::Series { start: s.start(), values: s.values().to_vec() })
        }
        GenrExpr::Diff { name, lag } => {
            let s = data
                .get(name)
                .ok_or_else(|| EconoError::UnknownSeries(name.clone()))?
                .lag(*lag as usize)?
                .diff(1)?;
            Ok(Value::Series { start: s.start(), values: s.values().to_vec() })
        }
        GenrExpr::Neg(e) => combine(Value::Scalar(0.0), eval(e, data)?, |a, b| a - b),
        GenrExpr::Add(a, b) => combine(eval(a, data)?, eval(b, data)?, |x, y| x + y),
        GenrExpr::Sub(a, b) => combine(eval(a, data)?, eval(b, data)?, |x, y| x - y),
        GenrExpr::Mul(a, b) => combine(eval(a, data)?, eval(b, data)?, |x, y| x * y),
        GenrExpr::Div(a, b) => combine(eval(a, data)?, eval(b, data)?, |x, y| x / y),
    }
}

/// Evaluate an expression over a dataset into a named series.
pub fn eval_genr(name: &str, expr: &GenrExpr, data: &Dataset) -> Result<QuarterlySeries> {
    match eval(expr, data)? {
        Value::Series { start, values } => QuarterlySeries::new(name, start, values),
        Value::Scalar(_) => Err(EconoError::Degenerate(
            "expression contains no series reference".into(),
        )),
    }
}

/// Evaluate and store; refuses to overwrite an existing series unless asked.
pub fn apply_genr(data: &mut Dataset, name: &str, expr: &GenrExpr, overwrite: bool) -> Result<()> {
    if data.get(name).is_some() && !overwrite {
        return Err(EconoError::DuplicateSeries(name.to_string()));
    }
    let s = eval_genr(name, expr, data)?;
    data.replace(s);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::period::QuarterPeriod;

    fn q(y: i32, qt: u8) -> QuarterPeriod {
        QuarterPeriod::new(y, qt).unwrap()
    }

    fn data() -> Dataset {
        let mut d = Dataset::new();
        d.insert(QuarterlySeries::new("A", q(2008, 1), vec![1.0; 12]).unwrap()).unwrap();
        d.insert(QuarterlySeries::new("B", q(2008, 1), vec![1.0; 12]).unwrap()).unwrap();
        d.insert(
            QuarterlySeries::new("CF", q(2008, 1), (1..=12).map(f64::from).collect()).unwrap(),
        )
        .unwrap();
        d
    }

    #[test]
    fn precedence_and_parens() {
        let (name, e) = parse_genr("X = 2*(A+B)").unwrap();
        assert_eq!(name, "X");
        let s = eval_genr(&name, &e, &data()).unwrap();
        assert!(s.values().iter().all(|v| *v == 4.0));

        let (_, e) = parse_genr("X = 1 + 2 * 3").unwrap();
        // scalar-only expressions are rejected at eval, so check the shape
        assert_eq!(
            e,
            GenrExpr::Add(
                Box::new(GenrExpr::Number(1.0)),
                Box::new(GenrExpr::Mul(Box::new(GenrExpr::Number(2.0)), Box::new(GenrExpr::Number(3.0))))
            )
        );
    }

    #[test]
    fn fisher_weights_via_genr_match_the_transform() {
        let d = data();
        let (name, e) = parse_genr(
            "ZCF = 8*CF + 7*CF(-1) + 6*CF(-2) + 5*CF(-3) + 4*CF(-4) + 3*CF(-5) + 2*CF(-6) + 1*CF(-7)",
        )
        .unwrap();
        let z = eval_genr(&name, &e, &d).unwrap();
        let direct = d.get("CF").unwrap().fisher_z(7).unwrap();
        assert_eq!(z.start(), direct.start());
        for (a, b) in z.values().iter().zip(direct.values()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn syntax_error_carries_position() {
        match parse_genr("X = A/") {
            Err(EconoError::Parse { col, .. }) => assert_eq!(col, 7),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(parse_genr("X A + B").is_err());
        assert!(parse_genr("9X = A").is_err());
        assert!(parse_genr("X = A +* B").is_err());
        assert!(parse_genr("X = (A").is_err());
    }

    #[test]
    fn lag_shifts_the_start() {
        let d = data();
        let (name, e) = parse_genr("L2 = CF(-2)").unwrap();
        let s = eval_genr(&name, &e, &d).unwrap();
        assert_eq!(s.start(), q(2008, 3));
        assert_eq!(s.value_at(q(2008, 3)), Some(1.0));
    }

    #[test]
    fn overwrite_guard() {
        let mut d = data();
        let (name, e) = parse_genr("CF = A + B").unwrap();
        assert!(matches!(
            apply_genr(&mut d, &name, &e, false),
            Err(EconoError::DuplicateSeries(_))
        ));
        apply_genr(&mut d, &name, &e, true).unwrap();
        assert_eq!(d.get("CF").unwrap().values()[0], 2.0);
    }
}

//! Recursive-descent parser for the expression grammar shared by
//! polynomials, operator matrices, skew polynomials and kernel expressions.
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := signed (('*'|'/') signed)*
//! signed := ('+'|'-') signed | factor
//! factor := atom ['^' integer]
//! atom   := number | ident | ident '(' expr ')' | '(' expr ')'
//! ```
//!
//! Numbers are integers, decimals or scientific literals and are read
//! exactly, so `0.1` is `1/10` and `1e-3` is `1/1000`.
//! Whitespace is insignificant.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::algebra::Rational;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(column: usize, message: impl Into<String>) -> Self {
        ParseError {
            line: 1,
            column,
            message: message.into(),
        }
    }

    /// Moves the error to a location inside a larger document.
    pub fn at_line(mut self, line: usize, column_offset: usize) -> Self {
        self.line = line;
        self.column += column_offset;
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(Rational),
    Var {
        name: String,
        column: usize,
    },
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>, usize),
    Pow(Box<Expr>, u32),
    Call {
        name: String,
        arg: Box<Expr>,
        column: usize,
    },
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(n) => write!(f, "number `{n}`"),
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Minus => f.write_str("`-`"),
            Tok::Star => f.write_str("`*`"),
            Tok::Slash => f.write_str("`/`"),
            Tok::Caret => f.write_str("`^`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            _ if c.is_ascii_digit() || c == '.' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                // optional exponent, only when digits follow
                if i < chars.len() && matches!(chars[i], 'e' | 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && matches!(chars[j], '+' | '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let s: String = chars[start..i].iter().collect();
                let n = parse_rational(&s).ok_or_else(|| ParseError::new(col, format!("malformed number `{s}`")))?;
                out.push((Tok::Num(n), col));
                continue;
            }
            _ if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                    i += 1;
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), col));
                continue;
            }
            _ => return Err(ParseError::new(col, format!("unexpected character `{c}`"))),
        };
        out.push((tok, col));
        i += 1;
    }
    out.push((Tok::End, chars.len() + 1));
    Ok(out)
}

/// Parses `123`, `1.25` or `.5` exactly.
pub fn parse_decimal(s: &str) -> Option<Rational> {
    let (int, frac) = match s.split_once('.') {
        Some((a, b)) => (a, b),
        None => (s, ""),
    };
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    let num = BigInt::from_str(&digits).ok()?;
    let den = num_traits::pow(BigInt::from(10), frac.len());
    Some(Rational::new(num, den))
}

/// Parses a signed rational or decimal literal: `-3`, `1/2`, `-0.25`, `1e-6`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let v = if let Some((n, d)) = body.split_once('/') {
        let n = parse_decimal(n.trim())?;
        let d = parse_decimal(d.trim())?;
        if d.is_zero() {
            return None;
        }
        n / d
    } else if let Some((m, e)) = body.split_once(['e', 'E']) {
        let m = parse_decimal(m)?;
        let e: i32 = e.parse().ok()?;
        let ten = Rational::from_integer(10.into());
        if e >= 0 {
            m * num_traits::pow(ten, e as usize)
        } else {
            m / num_traits::pow(ten, (-e) as usize)
        }
    } else {
        parse_decimal(body)?
    };
    Some(if neg { -v } else { v })
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn col(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, t: Tok) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(ParseError::new(
                self.col(),
                format!("expected {t}, found {}", self.peek()),
            ))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = match self.peek() {
            Tok::Minus => {
                self.bump();
                Expr::Neg(Box::new(self.term()?))
            }
            Tok::Plus => {
                self.bump();
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.signed()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.signed()?));
                }
                Tok::Slash => {
                    let (_, col) = self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.signed()?), col);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn signed(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                Ok(Expr::Neg(Box::new(self.signed()?)))
            }
            Tok::Plus => {
                self.bump();
                self.signed()
            }
            _ => self.factor(),
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if *self.peek() == Tok::Caret {
            let (_, caret) = self.bump();
            match self.bump() {
                (Tok::Num(n), _) if n.is_integer() && n >= Rational::zero() => {
                    let e: u32 = n
                        .to_integer()
                        .try_into()
                        .map_err(|_| ParseError::new(caret, "exponent too large"))?;
                    return Ok(Expr::Pow(Box::new(base), e));
                }
                _ => {
                    return Err(ParseError::new(
                        caret,
                        "expected a non-negative integer exponent after `^`",
                    ))
                }
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let (tok, col) = self.bump();
        match tok {
            Tok::Num(n) => Ok(Expr::Num(n)),
            Tok::Ident(name) => {
                if *self.peek() == Tok::LParen {
                    self.bump();
                    let arg = self.expr()?;
                    self.expect(Tok::RParen)?;
                    Ok(Expr::Call {
                        name,
                        arg: Box::new(arg),
                        column: col,
                    })
                } else {
                    Ok(Expr::Var { name, column: col })
                }
            }
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            other => Err(ParseError::new(col, format!("expected a term, found {other}"))),
        }
    }
}

/// Parses a complete expression.
pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(ParseError::new(p.col(), format!("unexpected {}", p.peek())));
    }
    Ok(e)
}

/// Evaluates an expression into any ring-like target.
///
/// The target supplies constants, identifiers, calls and division; sums,
/// products and powers are generic.
pub trait ExprTarget: Sized + Clone {
    fn constant(&self, c: &Rational) -> Self;
    fn ident(&self, name: &str, column: usize) -> Result<Self, ParseError>;
    fn call(&self, name: &str, _arg: Self, column: usize) -> Result<Self, ParseError> {
        Err(ParseError::new(column, format!("unknown function `{name}`")))
    }
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self, column: usize) -> Result<Self, ParseError>;
}

/// Folds an expression tree using `proto` as the context element
/// (its value is ignored; it fixes ring contexts).
pub fn eval_expr<T: ExprTarget>(e: &Expr, proto: &T) -> Result<T, ParseError> {
    Ok(match e {
        Expr::Num(n) => proto.constant(n),
        Expr::Var { name, column } => proto.ident(name, *column)?,
        Expr::Neg(a) => proto.constant(&Rational::zero()).sub(&eval_expr(a, proto)?),
        Expr::Add(a, b) => eval_expr(a, proto)?.add(&eval_expr(b, proto)?),
        Expr::Sub(a, b) => eval_expr(a, proto)?.sub(&eval_expr(b, proto)?),
        Expr::Mul(a, b) => eval_expr(a, proto)?.mul(&eval_expr(b, proto)?),
        Expr::Div(a, b, col) => eval_expr(a, proto)?.div(&eval_expr(b, proto)?, *col)?,
        Expr::Pow(a, k) => {
            let base = eval_expr(a, proto)?;
            let mut acc = proto.constant(&Rational::one());
            for _ in 0..*k {
                acc = acc.mul(&base);
            }
            acc
        }
        Expr::Call { name, arg, column } => {
            let a = eval_expr(arg, proto)?;
            proto.call(name, a, *column)?
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let e = parse_expr("1 + 2*x^2").unwrap();
        match e {
            Expr::Add(_, rhs) => assert!(matches!(*rhs, Expr::Mul(_, _))),
            _ => panic!("bad tree {e:?}"),
        }
    }

    #[test]
    fn dangling_caret() {
        let err = parse_expr("d1^").unwrap_err();
        assert_eq!(err.column, 3);
        assert!(err.message.contains('^'));
    }

    #[test]
    fn signed_factors() {
        let e = parse_expr("a + -2*b^2").unwrap();
        match e {
            Expr::Add(_, rhs) => assert!(matches!(*rhs, Expr::Mul(_, _))),
            _ => panic!("bad tree {e:?}"),
        }
        assert!(matches!(parse_expr("x*-1").unwrap(), Expr::Mul(_, _)));
        assert!(matches!(parse_expr("-x^2").unwrap(), Expr::Neg(_)));
    }

    #[test]
    fn unbalanced() {
        assert!(parse_expr("(a + b").is_err());
        assert!(parse_expr("a b").is_err());
        assert!(parse_expr("a + $").is_err());
    }

    #[test]
    fn literals() {
        assert_eq!(parse_decimal("0.25"), Some(Rational::new(1.into(), 4.into())));
        assert_eq!(parse_rational("-1/2"), Some(Rational::new((-1).into(), 2.into())));
        assert_eq!(parse_rational("1e-3"), Some(Rational::new(1.into(), 1000.into())));
        assert_eq!(parse_rational("2.5E2"), Some(Rational::from_integer(250.into())));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
    }

    #[test]
    fn scientific_literals_in_expressions() {
        assert_eq!(
            parse_expr("1e-3").unwrap(),
            Expr::Num(Rational::new(1.into(), 1000.into()))
        );
        assert_eq!(
            parse_expr("2.5E+2").unwrap(),
            Expr::Num(Rational::from_integer(250.into()))
        );
        assert!(parse_expr("2e").is_err());
    }
}

//! Exact arithmetic: rationals, multivariate polynomials, free-module
//! elements, monomial orders and operator matrices.

mod matrix;
mod module;
mod monomial;
mod order;
mod polynomial;

pub use matrix::OperatorMatrix;
pub use module::{module_leading_term, ModuleElement};
pub use monomial::Monomial;
pub use order::{BaseOrder, ModuleExtension, MonomialOrder};
pub use polynomial::{poly_arith, ArithOp, PolyDisplay, Polynomial};

use num_traits::{One, ToPrimitive, Zero};

use crate::text::{self, ExprTarget, ParseError};

pub type Rational = num_rational::BigRational;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("generator count mismatch: {left} vs {right}")]
    GeneratorMismatch { left: usize, right: usize },
    #[error("shape mismatch: {left_rows}x{left_cols} vs {right_rows}x{right_cols}")]
    ShapeMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },
    #[error("the zero element has no leading term")]
    ZeroElement,
    #[error("invalid ring declaration: {0}")]
    InvalidRing(String),
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact rational value of a finite float.
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// How a ring generator acts on functions of the coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Action {
    /// Partial derivative with respect to a coordinate.
    Differentiate(usize),
    /// Multiplication by a coordinate.
    Multiply(usize),
    /// Translation of a coordinate by the shift step.
    Shift(usize),
}

impl Action {
    pub fn coordinate(&self) -> usize {
        match *self {
            Action::Differentiate(i) | Action::Multiply(i) | Action::Shift(i) => i,
        }
    }
}

/// A commutative polynomial operator ring: named generators, each with an
/// action on functions. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ring {
    names: Vec<String>,
    actions: Vec<Action>,
    shift_step: Rational,
}

impl Ring {
    /// Generators act by differentiation, generator `i` on coordinate `i`.
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self, AlgebraError> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let actions = (0..names.len()).map(Action::Differentiate).collect();
        Self::with_actions(names, actions)
    }

    pub fn with_actions(names: Vec<String>, actions: Vec<Action>) -> Result<Self, AlgebraError> {
        if names.len() != actions.len() {
            return Err(AlgebraError::InvalidRing(format!(
                "{} generators but {} actions",
                names.len(),
                actions.len()
            )));
        }
        for (i, n) in names.iter().enumerate() {
            let valid = n.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_')
                && n.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '\'');
            if !valid {
                return Err(AlgebraError::InvalidRing(format!("`{n}` is not an identifier")));
            }
            if names[..i].contains(n) {
                return Err(AlgebraError::InvalidRing(format!("duplicate generator `{n}`")));
            }
        }
        Ok(Ring {
            names,
            actions,
            shift_step: Rational::one(),
        })
    }

    /// Translation distance used by shift generators; defaults to 1.
    pub fn with_shift_step(mut self, step: Rational) -> Self {
        self.shift_step = step;
        self
    }

    pub fn shift_step(&self) -> &Rational {
        &self.shift_step
    }

    /// Number of coordinates the generators act on.
    pub fn dim(&self) -> usize {
        self.actions.iter().map(|a| a.coordinate() + 1).max().unwrap_or(0)
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn var(&self, name: &str) -> Option<Polynomial> {
        let i = self.names.iter().position(|n| n == name)?;
        Some(Polynomial::var(self.nvars(), i))
    }

    pub fn parse(&self, src: &str) -> Result<Polynomial, ParseError> {
        let e = text::parse_expr(src)?;
        let proto = InRing {
            ring: self,
            poly: Polynomial::zero(self.nvars()),
        };
        Ok(text::eval_expr(&e, &proto)?.poly)
    }

    pub fn print(&self, p: &Polynomial) -> String {
        p.display(&self.names).to_string()
    }
}

#[derive(Clone)]
struct InRing<'a> {
    ring: &'a Ring,
    poly: Polynomial,
}

impl InRing<'_> {
    fn wrap(&self, poly: Polynomial) -> Self {
        InRing { ring: self.ring, poly }
    }
}

impl ExprTarget for InRing<'_> {
    fn constant(&self, c: &Rational) -> Self {
        self.wrap(Polynomial::constant(self.ring.nvars(), c.clone()))
    }

    fn ident(&self, name: &str, column: usize) -> Result<Self, ParseError> {
        self.ring
            .var(name)
            .map(|p| self.wrap(p))
            .ok_or_else(|| ParseError::new(column, format!("unknown generator `{name}`")))
    }

    fn add(&self, other: &Self) -> Self {
        self.wrap(&self.poly + &other.poly)
    }

    fn sub(&self, other: &Self) -> Self {
        self.wrap(&self.poly - &other.poly)
    }

    fn mul(&self, other: &Self) -> Self {
        self.wrap(&self.poly * &other.poly)
    }

    fn div(&self, other: &Self, column: usize) -> Result<Self, ParseError> {
        match other.poly.as_constant() {
            Some(c) if !c.is_zero() => Ok(self.wrap(self.poly.scale(&(Rational::from_integer(1.into()) / c)))),
            Some(_) => Err(ParseError::new(column, "division by zero")),
            None => Err(ParseError::new(
                column,
                "polynomials can only be divided by nonzero constants",
            )),
        }
    }
}

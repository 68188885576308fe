//! Symbolic covariance functions and their pushforward through operator
//! matrices.
//!
//! Expressions live in the class `Σ p_E(x, x') · exp(E(x, x'))` where each
//! prefactor `p_E` is a Laurent polynomial (monomial denominators only) and
//! each exponent `E` is a polynomial. The class is closed under
//! differentiation, multiplication by coordinates and, for polynomial
//! prefactors, translation, which covers every operator action in scope.

mod compile;
mod laurent;
mod ops;

pub use compile::{compile_evaluator, CompiledKernel, EvalError};
pub use laurent::Laurent;
pub use ops::{annihilation_check, apply_operator, apply_skew, pushforward_covariance, KernelOperator, OreOperator};

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::algebra::{Polynomial, Rational};
use crate::text::{self, ExprTarget, ParseError};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum KernelError {
    #[error("hyperparameter `{0}` must be positive")]
    NonPositiveHyperparameter(&'static str),
    #[error("unsupported expression: {0}")]
    Unsupported(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Which argument of `k(x, x')` an operator acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Unprimed,
    Primed,
}

/// Coordinate names; variable `i < d` is coordinate `i` of the first
/// argument, variable `d + i` the same coordinate of the second.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KernelVars {
    coords: Vec<String>,
    names: Vec<String>,
}

impl KernelVars {
    /// Argument copies are printed with suffixes `1` and `2`, or `_1` and
    /// `_2` when the coordinate name already ends in a digit.
    pub fn new<S: Into<String>>(coords: impl IntoIterator<Item = S>) -> Self {
        let coords: Vec<String> = coords.into_iter().map(Into::into).collect();
        let suffix = |c: &str, k: u8| {
            if c.ends_with(|ch: char| ch.is_ascii_digit()) {
                format!("{c}_{k}")
            } else {
                format!("{c}{k}")
            }
        };
        let names = coords
            .iter()
            .map(|c| suffix(c, 1))
            .chain(coords.iter().map(|c| suffix(c, 2)))
            .collect();
        KernelVars { coords, names }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn nvars(&self) -> usize {
        2 * self.coords.len()
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index(&self, coord: usize, side: Side) -> usize {
        match side {
            Side::Unprimed => coord,
            Side::Primed => self.dim() + coord,
        }
    }

    pub fn parse(&self, src: &str) -> Result<KernelExpr, ParseError> {
        let e = text::parse_expr(src)?;
        let proto = InVars {
            vars: self,
            expr: KernelExpr::zero(self.nvars()),
        };
        Ok(text::eval_expr(&e, &proto)?.expr)
    }

    pub fn print(&self, e: &KernelExpr) -> String {
        e.display(self).to_string()
    }
}

/// A covariance expression in canonical form: exponent polynomial mapped to
/// its (nonzero) Laurent prefactor. Equal expressions have equal maps.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KernelExpr {
    nvars: usize,
    groups: BTreeMap<Polynomial, Laurent>,
}

impl KernelExpr {
    pub fn zero(nvars: usize) -> Self {
        KernelExpr {
            nvars,
            groups: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        Self::from_laurent(Laurent::constant(nvars, c))
    }

    pub fn var(nvars: usize, v: usize) -> Self {
        Self::from_polynomial(&Polynomial::var(nvars, v))
    }

    pub fn from_polynomial(p: &Polynomial) -> Self {
        Self::from_laurent(Laurent::from_polynomial(p))
    }

    pub fn from_laurent(l: Laurent) -> Self {
        let mut e = Self::zero(l.nvars());
        e.add_group(Polynomial::zero(l.nvars()), l);
        e
    }

    /// `exp(arg)`
    pub fn exp(arg: Polynomial) -> Self {
        let n = arg.nvars();
        let mut e = Self::zero(n);
        e.add_group(arg, Laurent::constant(n, Rational::one()));
        e
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.groups.is_empty()
    }

    /// `(exponent, prefactor)` pairs.
    pub fn groups(&self) -> impl Iterator<Item = (&Polynomial, &Laurent)> {
        self.groups.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.groups.values().map(Laurent::num_terms).sum()
    }

    fn add_group(&mut self, arg: Polynomial, pre: Laurent) {
        if pre.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.groups.entry(arg) {
            Entry::Vacant(v) => {
                v.insert(pre);
            }
            Entry::Occupied(mut o) => {
                o.get_mut().add_assign(&pre);
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &KernelExpr) -> KernelExpr {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (a, l) in &other.groups {
            out.add_group(a.clone(), l.clone());
        }
        out
    }

    pub fn neg(&self) -> KernelExpr {
        self.scale(&-Rational::one())
    }

    pub fn sub(&self, other: &KernelExpr) -> KernelExpr {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rational) -> KernelExpr {
        let mut out = Self::zero(self.nvars);
        if c.is_zero() {
            return out;
        }
        out.groups = self.groups.iter().map(|(a, l)| (a.clone(), l.scale(c))).collect();
        out
    }

    pub fn mul(&self, other: &KernelExpr) -> KernelExpr {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        let mut out = Self::zero(self.nvars);
        for (a1, l1) in &self.groups {
            for (a2, l2) in &other.groups {
                out.add_group(a1 + a2, l1.mul(l2));
            }
        }
        out
    }

    pub fn mul_laurent(&self, l: &Laurent) -> KernelExpr {
        let mut out = Self::zero(self.nvars);
        for (a, p) in &self.groups {
            out.add_group(a.clone(), p.mul(l));
        }
        out
    }

    pub fn derivative(&self, var: usize) -> KernelExpr {
        let mut out = Self::zero(self.nvars);
        for (arg, pre) in &self.groups {
            let mut g = pre.derivative(var);
            let darg = arg.derivative(var);
            if !darg.is_zero() {
                g.add_assign(&pre.mul(&Laurent::from_polynomial(&darg)));
            }
            out.add_group(arg.clone(), g);
        }
        out
    }

    /// Multiplies by the variable `var`.
    pub fn mul_var(&self, var: usize) -> KernelExpr {
        let mut e = vec![0; self.nvars];
        e[var] = 1;
        self.mul_laurent(&Laurent::monomial(e, Rational::one()))
    }

    /// Substitutes `var -> var + step`; prefactors must be polynomial in `var`.
    pub fn shift(&self, var: usize, step: &Rational) -> Result<KernelExpr, KernelError> {
        let mut out = Self::zero(self.nvars);
        for (arg, pre) in &self.groups {
            if pre.min_exponent(var) < 0 {
                return Err(KernelError::Unsupported(
                    "cannot translate an expression with that variable in a denominator".into(),
                ));
            }
            // positive exponents are untouched by the split when var has none negative
            let (num, den) = pre.split_denominator();
            let shifted = Laurent::from_polynomial(&num.shift(var, step));
            let inv_den = Laurent::monomial(den.exponents().iter().map(|&e| -(e as i32)).collect(), Rational::one());
            out.add_group(arg.shift(var, step), shifted.mul(&inv_den));
        }
        Ok(out)
    }

    /// Exchanges the two arguments: `k(x, x') -> k(x', x)`.
    pub fn swap_arguments(&self) -> KernelExpr {
        let d = self.nvars / 2;
        let map: Vec<usize> = (0..self.nvars).map(|v| if v < d { v + d } else { v - d }).collect();
        let mut out = Self::zero(self.nvars);
        for (arg, pre) in &self.groups {
            let mut l = Laurent::zero(self.nvars);
            for (e, c) in pre.terms() {
                let mut e2 = vec![0; self.nvars];
                for (v, &x) in e.iter().enumerate() {
                    e2[map[v]] = x;
                }
                l.add_term(e2, c.clone());
            }
            out.add_group(arg.remap(self.nvars, &map), l);
        }
        out
    }

    /// Exact prefactor and exponent of each group at a rational point, or
    /// `None` at a pole.
    pub fn eval_exact_parts(&self, point: &[Rational]) -> Option<Vec<(Rational, Rational)>> {
        assert_eq!(point.len(), self.nvars);
        let mut out = Vec::new();
        for (arg, pre) in &self.groups {
            let mut p = Rational::zero();
            for (e, c) in pre.terms() {
                let mut t = c.clone();
                for (x, &k) in point.iter().zip(e) {
                    if k < 0 && x.is_zero() {
                        return None;
                    }
                    let base = if k < 0 { x.recip() } else { x.clone() };
                    for _ in 0..k.unsigned_abs() {
                        t *= &base;
                    }
                }
                p += t;
            }
            out.push((p, arg.eval(point)));
        }
        Some(out)
    }

    pub fn display<'a>(&'a self, vars: &'a KernelVars) -> KernelDisplay<'a> {
        KernelDisplay { expr: self, vars }
    }
}

pub struct KernelDisplay<'a> {
    expr: &'a KernelExpr,
    vars: &'a KernelVars,
}

impl fmt::Display for KernelDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.expr.is_zero() {
            return f.write_str("0");
        }
        let names = self.vars.names();
        for (i, (arg, pre)) in self.expr.groups.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            let (num, den) = pre.split_denominator();
            let has_exp = !arg.is_zero();
            let bare = pre.is_single_positive_term() || (!has_exp && den.is_one() && i == 0);
            if has_exp && num.is_one() && den.is_one() {
                write!(f, "exp({})", arg.display(names))?;
                continue;
            }
            if bare {
                write!(f, "{}", num.display(names))?;
            } else {
                write!(f, "({})", num.display(names))?;
            }
            if !den.is_one() {
                f.write_str("/")?;
                if den.degree() > 1 && den.exponents().iter().filter(|&&e| e > 0).count() > 1 {
                    f.write_str("(")?;
                    den.write_with(f, names)?;
                    f.write_str(")")?;
                } else {
                    den.write_with(f, names)?;
                }
            }
            if has_exp {
                write!(f, "*exp({})", arg.display(names))?;
            }
        }
        Ok(())
    }
}

#[derive(Clone)]
struct InVars<'a> {
    vars: &'a KernelVars,
    expr: KernelExpr,
}

impl InVars<'_> {
    fn wrap(&self, expr: KernelExpr) -> Self {
        InVars { vars: self.vars, expr }
    }

    /// The expression as a plain polynomial (no exp, no denominators).
    fn as_polynomial(&self) -> Option<Polynomial> {
        match self.expr.groups.len() {
            0 => Some(Polynomial::zero(self.expr.nvars)),
            1 => {
                let (arg, pre) = self.expr.groups.iter().next().unwrap();
                if arg.is_zero() {
                    pre.to_polynomial()
                } else {
                    None
                }
            }
            _ => None,
        }
    }
}

impl ExprTarget for InVars<'_> {
    fn constant(&self, c: &Rational) -> Self {
        self.wrap(KernelExpr::constant(self.vars.nvars(), c.clone()))
    }

    fn ident(&self, name: &str, column: usize) -> Result<Self, ParseError> {
        let i = self
            .vars
            .names()
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| ParseError::new(column, format!("unknown variable `{name}`")))?;
        Ok(self.wrap(KernelExpr::var(self.vars.nvars(), i)))
    }

    fn call(&self, name: &str, arg: Self, column: usize) -> Result<Self, ParseError> {
        if name != "exp" {
            return Err(ParseError::new(column, format!("unknown function `{name}`")));
        }
        let p = arg
            .as_polynomial()
            .ok_or_else(|| ParseError::new(column, "exp() needs a polynomial argument"))?;
        Ok(self.wrap(KernelExpr::exp(p)))
    }

    fn add(&self, other: &Self) -> Self {
        self.wrap(self.expr.add(&other.expr))
    }

    fn sub(&self, other: &Self) -> Self {
        self.wrap(self.expr.sub(&other.expr))
    }

    fn mul(&self, other: &Self) -> Self {
        self.wrap(self.expr.mul(&other.expr))
    }

    fn div(&self, other: &Self, column: usize) -> Result<Self, ParseError> {
        let p = other
            .as_polynomial()
            .filter(|p| p.num_terms() == 1)
            .ok_or_else(|| ParseError::new(column, "only division by a monomial is supported"))?;
        let (m, c) = p.terms().next().unwrap();
        let inv = Laurent::monomial(m.exponents().iter().map(|&e| -(e as i32)).collect(), c.recip());
        Ok(self.wrap(self.expr.mul_laurent(&inv)))
    }
}

/// `variance · exp(-Σ (x_i - x'_i)² / (2 lengthscale²))` over `d` coordinates.
pub fn se_kernel(d: usize, lengthscale: &Rational, variance: &Rational) -> Result<KernelExpr, KernelError> {
    if !lengthscale.is_positive() {
        return Err(KernelError::NonPositiveHyperparameter("lengthscale"));
    }
    if !variance.is_positive() {
        return Err(KernelError::NonPositiveHyperparameter("variance"));
    }
    let n = 2 * d;
    let mut sq = Polynomial::zero(n);
    for i in 0..d {
        let diff = &Polynomial::var(n, i) - &Polynomial::var(n, d + i);
        sq = &sq + &(&diff * &diff);
    }
    let factor = -(Rational::from_integer(2.into()) * lengthscale * lengthscale).recip();
    Ok(KernelExpr::exp(sq.scale(&factor)).scale(variance))
}

/// [`se_kernel`] with hyperparameters given as decimals, read exactly from
/// their shortest round-trip representation.
pub fn se_kernel_f64(d: usize, lengthscale: f64, variance: f64) -> Result<KernelExpr, KernelError> {
    let exact = |x: f64, name: &'static str| {
        if !(x.is_finite() && x > 0.0) {
            return Err(KernelError::NonPositiveHyperparameter(name));
        }
        text::parse_rational(&format!("{x:e}"))
            .ok_or_else(|| KernelError::Unsupported(format!("cannot read {x} as a rational")))
    };
    se_kernel(d, &exact(lengthscale, "lengthscale")?, &exact(variance, "variance")?)
}

/// A square matrix of covariance expressions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixKernel {
    vars: KernelVars,
    size: usize,
    entries: Vec<KernelExpr>,
}

impl MatrixKernel {
    pub fn new(vars: KernelVars, size: usize, entries: Vec<KernelExpr>) -> Self {
        assert_eq!(entries.len(), size * size);
        assert!(entries.iter().all(|e| e.nvars() == vars.nvars()));
        MatrixKernel { vars, size, entries }
    }

    /// Block-diagonal kernel of independent components.
    pub fn diagonal(vars: KernelVars, blocks: &[KernelExpr]) -> Self {
        let n = blocks.len();
        let mut entries = vec![KernelExpr::zero(vars.nvars()); n * n];
        for (i, b) in blocks.iter().enumerate() {
            entries[i * n + i] = b.clone();
        }
        Self::new(vars, n, entries)
    }

    pub fn vars(&self) -> &KernelVars {
        &self.vars
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> &KernelExpr {
        &self.entries[i * self.size + j]
    }

    pub fn entries(&self) -> &[KernelExpr] {
        &self.entries
    }

    /// `K(x, x')_{ij} = K(x', x)_{ji}` for all entries.
    pub fn is_symmetric(&self) -> bool {
        (0..self.size).all(|i| (i..self.size).all(|j| self.get(i, j).swap_arguments() == *self.get(j, i)))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(KernelExpr::is_zero)
    }

    pub fn print(&self) -> String {
        let mut s = String::new();
        for i in 0..self.size {
            for j in 0..self.size {
                s.push_str(&format!("[{},{}] {}\n", i + 1, j + 1, self.vars.print(self.get(i, j))));
            }
        }
        s
    }
}

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::{AlgebraError, Monomial, MonomialOrder, Rational};

/// A multivariate polynomial with exact rational coefficients.
///
/// Zero coefficients are never stored, so two polynomials are equal exactly
/// when their term maps are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

/// Checked ring arithmetic; fails when the operands live in rings with
/// different generator counts.
pub fn poly_arith(a: &Polynomial, b: &Polynomial, op: ArithOp) -> Result<Polynomial, AlgebraError> {
    if a.nvars != b.nvars {
        return Err(AlgebraError::GeneratorMismatch {
            left: a.nvars,
            right: b.nvars,
        });
    }
    Ok(match op {
        ArithOp::Add => a + b,
        ArithOp::Sub => a - b,
        ArithOp::Mul => a * b,
    })
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        Self::term(Monomial::one(nvars), c)
    }

    pub fn var(nvars: usize, var: usize) -> Self {
        Self::term(Monomial::var(nvars, var), Rational::one())
    }

    pub fn term(m: Monomial, c: Rational) -> Self {
        let nvars = m.nvars();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { nvars, terms }
    }

    /// Builds a polynomial from terms, combining duplicates and dropping zeros.
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = Polynomial::zero(nvars);
        for (m, c) in terms {
            assert_eq!(m.nvars(), nvars, "monomial has wrong generator count");
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.iter().next().is_some_and(|(m, c)| m.is_one() && c.is_one())
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Monomial, Rational)> {
        self.terms.into_iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// The constant coefficient, if the polynomial is a constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn leading_term(&self, order: &MonomialOrder) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().max_by(|a, b| order.cmp_monomials(a.0, b.0))
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(k, a)| (k.mul(m), a.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc = Polynomial::one(self.nvars);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Partial derivative with respect to generator `var`.
    pub fn derivative(&self, var: usize) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.exponents()[var];
            if e == 0 {
                continue;
            }
            let mut ex = m.exponents().to_vec();
            ex[var] -= 1;
            out.add_term(Monomial::new(ex), c * Rational::from_integer(e.into()));
        }
        out
    }

    /// Substitutes `var -> var + shift`.
    pub fn shift(&self, var: usize, shift: &Rational) -> Polynomial {
        let base = &Polynomial::var(self.nvars, var) + &Polynomial::constant(self.nvars, shift.clone());
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            let mut ex = m.exponents().to_vec();
            let e = ex[var];
            ex[var] = 0;
            let rest = Polynomial::term(Monomial::new(ex), c.clone());
            out = &out + &(&rest * &base.pow(e));
        }
        out
    }

    /// Re-embeds into a ring with `nvars` generators, mapping generator `i` to `map[i]`.
    pub fn remap(&self, nvars: usize, map: &[usize]) -> Polynomial {
        Polynomial::from_terms(
            nvars,
            self.terms.iter().map(|(m, c)| {
                let mut e = vec![0; nvars];
                for (i, &x) in m.exponents().iter().enumerate() {
                    e[map[i]] += x;
                }
                (Monomial::new(e), c.clone())
            }),
        )
    }

    /// Exact evaluation at a rational point.
    pub fn eval(&self, point: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(m.exponents()) {
                for _ in 0..e {
                    t *= x;
                }
            }
            acc += t;
        }
        acc
    }

    /// Printable form using the given generator names.
    pub fn display<'a>(&'a self, names: &'a [String]) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, names }
    }

    /// Terms in descending degrevlex order; used for printing.
    pub(crate) fn print_order(&self) -> Vec<(&Monomial, &Rational)> {
        let order = MonomialOrder::degrevlex_top();
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| order.cmp_monomials(b.0, a.0));
        v
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a Polynomial,
    names: &'a [String],
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.poly.print_order().into_iter().enumerate() {
            let neg = c.is_negative();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let abs = c.abs();
            if m.is_one() {
                write!(f, "{abs}")?;
            } else {
                if !abs.is_one() {
                    write!(f, "{abs}*")?;
                }
                m.write_with(f, self.names)?;
            }
        }
        Ok(())
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "generator count mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "generator count mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "generator count mismatch");
        let mut out = Polynomial::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $f(self, rhs: Polynomial) -> Polynomial {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

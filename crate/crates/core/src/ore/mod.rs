//! Ordinary differential operators with rational coefficients: the skew
//! polynomial ring ℚ(t)⟨∂⟩ with `∂·t = t·∂ + 1`, Euclidean division on
//! either side, and kernels of matrices over it.

mod matrix;
mod ratfunc;
mod unipoly;

pub use matrix::{
    ore_check_parametrizable, ore_left_kernel, ore_right_kernel, OreMatrix, OreParametrizationReport, RowEchelon,
};
pub use ratfunc::RatFunc;
pub use unipoly::UniPoly;

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::algebra::{Polynomial, Rational};
use crate::text::{self, ExprTarget, ParseError};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum OreError {
    #[error("division by the zero operator")]
    DivisionByZero,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

/// `Σ coeffs[i] · ∂^i` with coefficients written on the left.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct SkewPoly {
    coeffs: Vec<RatFunc>,
}

impl SkewPoly {
    pub fn new(mut coeffs: Vec<RatFunc>) -> Self {
        while coeffs.last().is_some_and(RatFunc::is_zero) {
            coeffs.pop();
        }
        SkewPoly { coeffs }
    }

    pub fn zero() -> Self {
        SkewPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_coeff(RatFunc::one())
    }

    pub fn from_coeff(c: RatFunc) -> Self {
        Self::new(vec![c])
    }

    /// The derivation `∂`.
    pub fn d() -> Self {
        Self::new(vec![RatFunc::zero(), RatFunc::one()])
    }

    /// `c · ∂^k`
    pub fn term(c: RatFunc, k: usize) -> Self {
        let mut v = vec![RatFunc::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    pub fn coeffs(&self) -> &[RatFunc] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&RatFunc> {
        self.coeffs.last()
    }

    pub fn add(&self, other: &SkewPoly) -> SkewPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        SkewPoly::new(
            (0..n)
                .map(|i| match (self.coeffs.get(i), other.coeffs.get(i)) {
                    (Some(a), Some(b)) => a + b,
                    (Some(a), None) | (None, Some(a)) => a.clone(),
                    (None, None) => unreachable!(),
                })
                .collect(),
        )
    }

    pub fn neg(&self) -> SkewPoly {
        SkewPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, other: &SkewPoly) -> SkewPoly {
        self.add(&other.neg())
    }

    /// `∂^k · r = Σ_j binom(k, j) r^(j) ∂^(k-j)`
    fn d_pow_times(k: usize, r: &RatFunc) -> Vec<RatFunc> {
        let mut out = vec![RatFunc::zero(); k + 1];
        let mut deriv = r.clone();
        let mut binom = Rational::one();
        for j in 0..=k {
            out[k - j] = &deriv * &RatFunc::constant(binom.clone());
            binom = binom * Rational::from_integer((k - j).into()) / Rational::from_integer((j + 1).into());
            deriv = deriv.derivative();
            if deriv.is_zero() {
                break;
            }
        }
        out
    }

    /// The product `self · other` in ℚ(t)⟨∂⟩.
    pub fn mul(&self, other: &SkewPoly) -> SkewPoly {
        if self.is_zero() || other.is_zero() {
            return SkewPoly::zero();
        }
        let mut out = vec![RatFunc::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                for (k, c) in Self::d_pow_times(i, b).iter().enumerate() {
                    if !c.is_zero() {
                        out[k + j] = &out[k + j] + &(a * c);
                    }
                }
            }
        }
        SkewPoly::new(out)
    }

    pub fn scale_left(&self, r: &RatFunc) -> SkewPoly {
        SkewPoly::new(self.coeffs.iter().map(|c| r * c).collect())
    }
}

/// `a · b` in ℚ(t)⟨∂⟩.
pub fn skew_mul(a: &SkewPoly, b: &SkewPoly) -> SkewPoly {
    a.mul(b)
}

/// Division with the quotient on the left: `a = q·b + r`, `deg r < deg b`.
pub fn right_divide(a: &SkewPoly, b: &SkewPoly) -> Result<(SkewPoly, SkewPoly), OreError> {
    divide(a, b, true)
}

/// Division with the quotient on the right: `a = b·q + r`, `deg r < deg b`.
pub fn left_divide(a: &SkewPoly, b: &SkewPoly) -> Result<(SkewPoly, SkewPoly), OreError> {
    divide(a, b, false)
}

fn divide(a: &SkewPoly, b: &SkewPoly, quotient_left: bool) -> Result<(SkewPoly, SkewPoly), OreError> {
    let db = b.degree().ok_or(OreError::DivisionByZero)?;
    let lb_inv = b.leading().unwrap().inv().unwrap();
    let mut q = SkewPoly::zero();
    let mut r = a.clone();
    while let Some(dr) = r.degree() {
        if dr < db {
            break;
        }
        // The leading coefficient of c∂^k·b and of b·c∂^k is c·lc(b) either way.
        let t = SkewPoly::term(r.leading().unwrap() * &lb_inv, dr - db);
        let prod = if quotient_left { t.mul(b) } else { b.mul(&t) };
        r = r.sub(&prod);
        q = q.add(&t);
        debug_assert!(r.degree().is_none_or(|d| d < dr));
    }
    Ok((q, r))
}

/// Names for the variable and the derivation, used for parsing and printing.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OreRing {
    var: String,
    deriv: String,
}

impl Default for OreRing {
    fn default() -> Self {
        OreRing {
            var: "t".into(),
            deriv: "dt".into(),
        }
    }
}

impl OreRing {
    pub fn new(var: impl Into<String>, deriv: impl Into<String>) -> Self {
        OreRing {
            var: var.into(),
            deriv: deriv.into(),
        }
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    pub fn deriv(&self) -> &str {
        &self.deriv
    }

    /// Parses e.g. `1/t^3*dt` or `(t^2 + 1)/(t - 1)*dt^2 - t`; products are
    /// taken in the order written.
    pub fn parse(&self, src: &str) -> Result<SkewPoly, ParseError> {
        let e = text::parse_expr(src)?;
        Ok(text::eval_expr(
            &e,
            &InOre {
                ring: self,
                op: SkewPoly::zero(),
            },
        )?
        .op)
    }

    fn write_unipoly(&self, p: &UniPoly) -> String {
        p.to_polynomial(1, 0)
            .display(std::slice::from_ref(&self.var))
            .to_string()
    }

    fn coeff_string(&self, c: &RatFunc) -> (bool, String) {
        let num = c.num();
        let single = num.coeffs().iter().filter(|x| !x.is_zero()).count() == 1;
        let (neg, num) = if single && num.leading().unwrap().is_negative() {
            (true, -num)
        } else {
            (false, num.clone())
        };
        let n = self.write_unipoly(&num);
        let s = if c.den().is_one() {
            if single {
                n
            } else {
                format!("({n})")
            }
        } else {
            let d = self.write_unipoly(c.den());
            let n = if single { n } else { format!("({n})") };
            let d = if c.den().coeffs().iter().filter(|x| !x.is_zero()).count() == 1 {
                d
            } else {
                format!("({d})")
            };
            format!("{n}/{d}")
        };
        (neg, s)
    }

    pub fn print(&self, p: &SkewPoly) -> String {
        if p.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, c) in p.coeffs().iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let (neg, cs) = self.coeff_string(c);
            let body = match k {
                0 => cs,
                _ => {
                    let d = if k == 1 {
                        self.deriv.clone()
                    } else {
                        format!("{}^{k}", self.deriv)
                    };
                    if cs == "1" {
                        d
                    } else {
                        format!("{cs}*{d}")
                    }
                }
            };
            match (out.is_empty(), neg) {
                (true, true) => out.push('-'),
                (true, false) => {}
                (false, true) => out.push_str(" - "),
                (false, false) => out.push_str(" + "),
            }
            out.push_str(&body);
        }
        out
    }

    pub fn display<'a>(&'a self, p: &'a SkewPoly) -> impl fmt::Display + 'a {
        struct D<'a>(&'a OreRing, &'a SkewPoly);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0.print(self.1))
            }
        }
        D(self, p)
    }
}

#[derive(Clone)]
struct InOre<'a> {
    ring: &'a OreRing,
    op: SkewPoly,
}

impl InOre<'_> {
    fn wrap(&self, op: SkewPoly) -> Self {
        InOre { ring: self.ring, op }
    }
}

impl ExprTarget for InOre<'_> {
    fn constant(&self, c: &Rational) -> Self {
        self.wrap(SkewPoly::from_coeff(RatFunc::constant(c.clone())))
    }

    fn ident(&self, name: &str, column: usize) -> Result<Self, ParseError> {
        if name == self.ring.var {
            Ok(self.wrap(SkewPoly::from_coeff(RatFunc::var())))
        } else if name == self.ring.deriv {
            Ok(self.wrap(SkewPoly::d()))
        } else {
            Err(ParseError::new(column, format!("unknown identifier `{name}`")))
        }
    }

    fn add(&self, other: &Self) -> Self {
        self.wrap(self.op.add(&other.op))
    }

    fn sub(&self, other: &Self) -> Self {
        self.wrap(self.op.sub(&other.op))
    }

    fn mul(&self, other: &Self) -> Self {
        self.wrap(self.op.mul(&other.op))
    }

    fn div(&self, other: &Self, column: usize) -> Result<Self, ParseError> {
        match other.op.degree() {
            None => Err(ParseError::new(column, "division by zero")),
            Some(0) => {
                let inv = other.op.coeffs()[0].inv().unwrap();
                Ok(self.wrap(self.op.mul(&SkewPoly::from_coeff(inv))))
            }
            Some(_) => Err(ParseError::new(
                column,
                "can only divide by rational functions of the variable",
            )),
        }
    }
}

/// Converts a polynomial in the single generator of a one-generator ring.
pub fn skew_from_polynomial(p: &Polynomial) -> Option<SkewPoly> {
    let u = UniPoly::from_polynomial(p, 0)?;
    Some(SkewPoly::from_coeff(RatFunc::from_poly(u)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ore() -> OreRing {
        OreRing::default()
    }

    #[test]
    fn commutation_relation() {
        let r = ore();
        assert_eq!(
            skew_mul(&r.parse("dt").unwrap(), &r.parse("t").unwrap()),
            r.parse("t*dt + 1").unwrap()
        );
        // the parser multiplies in written order, so compare against explicit coefficients
        let expect = SkewPoly::new(vec![
            RatFunc::from_poly(UniPoly::monomial(Rational::from_integer(3.into()), 2)),
            RatFunc::from_poly(UniPoly::monomial(Rational::one(), 3)),
        ]);
        assert_eq!(skew_mul(&SkewPoly::d(), &r.parse("t^3").unwrap()), expect);
        let a = r.parse("t^2*dt^2 + 1/t").unwrap();
        assert_eq!(skew_mul(&a, &SkewPoly::one()), a);
    }

    #[test]
    fn division_examples() {
        let r = ore();
        let (q, rem) = right_divide(&r.parse("dt^2").unwrap(), &SkewPoly::d()).unwrap();
        assert_eq!((q, rem), (SkewPoly::d(), SkewPoly::zero()));

        let a = r.parse("dt*t").unwrap();
        let b = r.parse("t").unwrap();
        let (q, rem) = right_divide(&a, &b).unwrap();
        assert!(rem.is_zero());
        assert_eq!(q.mul(&b), a);
        let (q, rem) = left_divide(&a, &b).unwrap();
        assert!(rem.is_zero());
        assert_eq!(b.mul(&q), a);

        assert_eq!(right_divide(&a, &SkewPoly::zero()), Err(OreError::DivisionByZero));
    }

    #[test]
    fn parse_print_round_trip() {
        let r = ore();
        for s in [
            "1/t^3*dt",
            "-t^3",
            "dt",
            "(t^2 + 1)/(t - 1)*dt^2 - 3*t + 1/2",
            "-1/t*dt + t",
            "0",
        ] {
            let p = r.parse(s).unwrap();
            let printed = r.print(&p);
            assert_eq!(r.parse(&printed).unwrap(), p, "{s} printed as {printed}");
        }
        assert_eq!(r.print(&r.parse("1/t^3*dt").unwrap()), "1/t^3*dt");
        assert!(r.parse("t/dt").is_err());
        assert!(r.parse("x").is_err());
    }
}

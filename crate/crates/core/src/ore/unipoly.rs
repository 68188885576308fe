use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::algebra::{Monomial, Polynomial, Rational};

/// Dense univariate polynomial over ℚ, lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct UniPoly(Vec<Rational>);

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UniPoly(coeffs)
    }

    pub fn zero() -> Self {
        UniPoly(Vec::new())
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// `c * t^k`
    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut v = vec![Rational::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.0.len() == 1 && self.0[0].is_one()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.0.last()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.0.iter().map(|a| a * c).collect())
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(lc) => self.scale(&lc.recip()),
            None => self.clone(),
        }
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::from_integer(i.into()))
                .collect(),
        )
    }

    pub fn div_rem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lc = d.leading().unwrap().clone();
        let mut r = self.0.clone();
        let mut q = vec![Rational::zero(); r.len().saturating_sub(dd)];
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1 - dd;
            let c = r.last().unwrap() / &lc;
            for (i, dc) in d.0.iter().enumerate() {
                r[k + i] -= &c * dc;
            }
            q[k] = c;
            r.pop();
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        (UniPoly::new(q), UniPoly::new(r))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        self.0.iter().rev().fold(Rational::zero(), |acc, c| acc * t + c)
    }

    /// `Some(k)` if the polynomial is exactly `t^k`.
    pub fn as_power(&self) -> Option<usize> {
        let k = self.degree()?;
        (self.0[k].is_one() && self.0[..k].iter().all(Zero::is_zero)).then_some(k)
    }

    /// The same polynomial as a multivariate polynomial in generator `var` of `nvars`.
    pub fn to_polynomial(&self, nvars: usize, var: usize) -> Polynomial {
        Polynomial::from_terms(
            nvars,
            self.0.iter().enumerate().map(|(k, c)| {
                let mut e = vec![0; nvars];
                e[var] = k as u32;
                (Monomial::new(e), c.clone())
            }),
        )
    }

    pub fn from_polynomial(p: &Polynomial, var: usize) -> Option<UniPoly> {
        let mut v = Vec::new();
        for (m, c) in p.terms() {
            let ex = m.exponents();
            if ex.iter().enumerate().any(|(i, &e)| i != var && e != 0) {
                return None;
            }
            let k = ex[var] as usize;
            if v.len() <= k {
                v.resize(k + 1, Rational::zero());
            }
            v[k] = c.clone();
        }
        Some(UniPoly::new(v))
    }
}

impl Add for &UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: &UniPoly) -> UniPoly {
        let n = self.0.len().max(rhs.0.len());
        UniPoly::new(
            (0..n)
                .map(|i| {
                    let a = self.0.get(i).cloned().unwrap_or_else(Rational::zero);
                    let b = rhs.0.get(i).cloned().unwrap_or_else(Rational::zero);
                    a + b
                })
                .collect(),
        )
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly(self.0.iter().map(|c| -c).collect())
    }
}

impl Sub for &UniPoly {
    type Output = UniPoly;
    fn sub(self, rhs: &UniPoly) -> UniPoly {
        self + &(-rhs)
    }
}

impl Mul for &UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: &UniPoly) -> UniPoly {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero();
        }
        let mut v = vec![Rational::zero(); self.0.len() + rhs.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in rhs.0.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        UniPoly::new(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> UniPoly {
        UniPoly::new(c.iter().map(|&x| Rational::from_integer(x.into())).collect())
    }

    #[test]
    fn division_and_gcd() {
        // (t^2 - 1) = (t - 1)(t + 1)
        let a = p(&[-1, 0, 1]);
        let b = p(&[-1, 1]);
        let (q, r) = a.div_rem(&b);
        assert_eq!(q, p(&[1, 1]));
        assert!(r.is_zero());
        assert_eq!(a.gcd(&p(&[1, 1])), p(&[1, 1]));
        assert_eq!(p(&[2, 0, 2]).gcd(&p(&[0, 3])), p(&[1]));
    }

    #[test]
    fn derivative_eval_power() {
        let a = p(&[1, 2, 0, 4]);
        assert_eq!(a.derivative(), p(&[2, 0, 12]));
        assert_eq!(
            a.eval(&Rational::from_integer(2.into())),
            Rational::from_integer(37.into())
        );
        assert_eq!(p(&[0, 0, 0, 1]).as_power(), Some(3));
        assert_eq!(p(&[0, 0, 2]).as_power(), None);
    }
}

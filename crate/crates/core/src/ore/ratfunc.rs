use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::UniPoly;
use crate::algebra::Rational;

/// A rational function `num / den` in one variable, in lowest terms with a
/// monic denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: UniPoly,
    den: UniPoly,
}

impl RatFunc {
    pub fn new(num: UniPoly, den: UniPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Self::zero();
        }
        let g = num.gcd(&den);
        let (num, _) = num.div_rem(&g);
        let (den, _) = den.div_rem(&g);
        let lc = den.leading().unwrap().recip();
        RatFunc {
            num: num.scale(&lc),
            den: den.scale(&lc),
        }
    }

    pub fn zero() -> Self {
        RatFunc {
            num: UniPoly::zero(),
            den: UniPoly::one(),
        }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_poly(UniPoly::constant(c))
    }

    pub fn from_poly(p: UniPoly) -> Self {
        RatFunc {
            num: p,
            den: UniPoly::one(),
        }
    }

    /// The variable `t`.
    pub fn var() -> Self {
        Self::from_poly(UniPoly::monomial(Rational::one(), 1))
    }

    pub fn num(&self) -> &UniPoly {
        &self.num
    }

    pub fn den(&self) -> &UniPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn inv(&self) -> Option<Self> {
        (!self.is_zero()).then(|| RatFunc::new(self.den.clone(), self.num.clone()))
    }

    pub fn derivative(&self) -> Self {
        let top = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        RatFunc::new(top, &self.den * &self.den)
    }

    /// Exact value at `t`, or `None` at a pole.
    pub fn eval(&self, t: &Rational) -> Option<Rational> {
        let d = self.den.eval(t);
        (!d.is_zero()).then(|| self.num.eval(t) / d)
    }
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        if self.den == rhs.den {
            return RatFunc::new(&self.num + &rhs.num, self.den.clone());
        }
        RatFunc::new(&(&self.num * &rhs.den) + &(&rhs.num * &self.den), &self.den * &rhs.den)
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        self + &(-rhs)
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() || rhs.is_zero() {
            return RatFunc::zero();
        }
        RatFunc::new(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Default for RatFunc {
    fn default() -> Self {
        Self::zero()
    }
}

impl Zero for RatFunc {
    fn zero() -> Self {
        RatFunc::zero()
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl Add for RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: RatFunc) -> RatFunc {
        &self + &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn normalizes() {
        // (2t^2 - 2) / (2t - 2) = t + 1
        let f = RatFunc::new(UniPoly::new(vec![q(-2), q(0), q(2)]), UniPoly::new(vec![q(-2), q(2)]));
        assert_eq!(f, RatFunc::from_poly(UniPoly::new(vec![q(1), q(1)])));
        // 1 / (3t) has monic denominator t and numerator 1/3
        let g = RatFunc::new(UniPoly::one(), UniPoly::monomial(q(3), 1));
        assert_eq!(g.den(), &UniPoly::monomial(q(1), 1));
        assert_eq!(g.num(), &UniPoly::constant(Rational::new(1.into(), 3.into())));
    }

    #[test]
    fn quotient_rule() {
        // d/dt t^-3 = -3 t^-4
        let f = RatFunc::new(UniPoly::one(), UniPoly::monomial(q(1), 3));
        let df = f.derivative();
        assert_eq!(df, RatFunc::new(UniPoly::constant(q(-3)), UniPoly::monomial(q(1), 4)));
        assert_eq!(f.eval(&q(0)), None);
        assert_eq!(f.eval(&q(2)), Some(Rational::new(1.into(), 8.into())));
    }
}

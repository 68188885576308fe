use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::algebra::{Monomial, Polynomial, Rational};

/// A Laurent polynomial: monomials may carry negative exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Laurent {
    nvars: usize,
    terms: BTreeMap<Vec<i32>, Rational>,
}

impl Laurent {
    pub fn zero(nvars: usize) -> Self {
        Laurent {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut l = Self::zero(nvars);
        l.add_term(vec![0; nvars], c);
        l
    }

    pub fn monomial(exps: Vec<i32>, c: Rational) -> Self {
        let mut l = Self::zero(exps.len());
        l.add_term(exps, c);
        l
    }

    pub fn from_polynomial(p: &Polynomial) -> Self {
        let mut l = Self::zero(p.nvars());
        for (m, c) in p.terms() {
            l.add_term(m.exponents().iter().map(|&e| e as i32).collect(), c.clone());
        }
        l
    }

    /// The polynomial, if no exponent is negative.
    pub fn to_polynomial(&self) -> Option<Polynomial> {
        let mut p = Polynomial::zero(self.nvars);
        for (e, c) in &self.terms {
            if e.iter().any(|&x| x < 0) {
                return None;
            }
            p.add_term(Monomial::new(e.iter().map(|&x| x as u32).collect()), c.clone());
        }
        Some(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i32>, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, e: Vec<i32>, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
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

    pub fn add_assign(&mut self, other: &Laurent) {
        for (e, c) in &other.terms {
            self.add_term(e.clone(), c.clone());
        }
    }

    pub fn scale(&self, c: &Rational) -> Laurent {
        let mut out = Laurent::zero(self.nvars);
        if c.is_zero() {
            return out;
        }
        out.terms = self.terms.iter().map(|(e, a)| (e.clone(), a * c)).collect();
        out
    }

    pub fn mul(&self, other: &Laurent) -> Laurent {
        let mut out = Laurent::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                out.add_term(ea.iter().zip(eb).map(|(a, b)| a + b).collect(), ca * cb);
            }
        }
        out
    }

    pub fn derivative(&self, var: usize) -> Laurent {
        let mut out = Laurent::zero(self.nvars);
        for (e, c) in &self.terms {
            let k = e[var];
            if k == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[var] -= 1;
            out.add_term(e2, c * Rational::from_integer(k.into()));
        }
        out
    }

    /// Smallest exponent of `var` across all terms (0 if none is negative).
    pub fn min_exponent(&self, var: usize) -> i32 {
        self.terms.keys().map(|e| e[var]).min().unwrap_or(0).min(0)
    }

    /// Splits into `numerator / denominator` with a polynomial numerator
    /// and a monomial denominator.
    pub fn split_denominator(&self) -> (Polynomial, Monomial) {
        let den: Vec<u32> = (0..self.nvars).map(|v| (-self.min_exponent(v)) as u32).collect();
        let num = Polynomial::from_terms(
            self.nvars,
            self.terms.iter().map(|(e, c)| {
                let m = e.iter().zip(&den).map(|(&a, &d)| (a + d as i32) as u32).collect();
                (Monomial::new(m), c.clone())
            }),
        );
        (num, Monomial::new(den))
    }

    pub fn is_single_positive_term(&self) -> bool {
        self.terms.len() == 1 && self.terms.values().next().is_some_and(|c| c.is_positive())
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .is_some_and(|(e, c)| c.is_one() && e.iter().all(|&x| x == 0))
    }
}

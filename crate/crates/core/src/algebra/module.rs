use std::collections::BTreeMap;

use num_traits::Zero;

use super::{AlgebraError, Monomial, MonomialOrder, Polynomial, Rational};

/// An element of the free module `R^rank`, as a sparse set of
/// `(component, monomial) -> coefficient` terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModuleElement {
    rank: usize,
    nvars: usize,
    terms: BTreeMap<(usize, Monomial), Rational>,
}

impl ModuleElement {
    pub fn zero(rank: usize, nvars: usize) -> Self {
        ModuleElement {
            rank,
            nvars,
            terms: BTreeMap::new(),
        }
    }

    /// The basis vector `e_i` scaled by `p`.
    pub fn unit(rank: usize, i: usize, p: &Polynomial) -> Self {
        let mut v = vec![Polynomial::zero(p.nvars()); rank];
        v[i] = p.clone();
        Self::from_components(p.nvars(), &v)
    }

    pub fn from_components(nvars: usize, comps: &[Polynomial]) -> Self {
        let mut e = ModuleElement::zero(comps.len(), nvars);
        for (i, p) in comps.iter().enumerate() {
            assert_eq!(p.nvars(), nvars, "generator count mismatch");
            for (m, c) in p.terms() {
                e.terms.insert((i, m.clone()), c.clone());
            }
        }
        e
    }

    pub fn from_terms(rank: usize, nvars: usize, terms: impl IntoIterator<Item = (usize, Monomial, Rational)>) -> Self {
        let mut e = ModuleElement::zero(rank, nvars);
        for (i, m, c) in terms {
            assert!(i < rank, "component index {i} out of range for rank {rank}");
            e.add_term(i, m, c);
        }
        e
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &Monomial, &Rational)> {
        self.terms.iter().map(|((i, m), c)| (*i, m, c))
    }

    pub fn add_term(&mut self, i: usize, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry((i, m)) {
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

    pub fn component(&self, i: usize) -> Polynomial {
        Polynomial::from_terms(
            self.nvars,
            self.terms
                .range((i, Monomial::one(self.nvars))..)
                .take_while(|((j, _), _)| *j == i)
                .map(|((_, m), c)| (m.clone(), c.clone())),
        )
    }

    pub fn components(&self) -> Vec<Polynomial> {
        let mut out = vec![Polynomial::zero(self.nvars); self.rank];
        for ((i, m), c) in &self.terms {
            out[*i].add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn leading_term(&self, order: &MonomialOrder) -> Option<(usize, &Monomial, &Rational)> {
        self.terms
            .iter()
            .max_by(|a, b| order.cmp_terms((a.0 .0, &a.0 .1), (b.0 .0, &b.0 .1)))
            .map(|((i, m), c)| (*i, m, c))
    }

    pub fn add(&self, other: &ModuleElement) -> ModuleElement {
        assert_eq!((self.rank, self.nvars), (other.rank, other.nvars), "module mismatch");
        let mut out = self.clone();
        for ((i, m), c) in &other.terms {
            out.add_term(*i, m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &ModuleElement) -> ModuleElement {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> ModuleElement {
        self.scale(&-Rational::from_integer(1.into()))
    }

    pub fn scale(&self, c: &Rational) -> ModuleElement {
        let mut out = ModuleElement::zero(self.rank, self.nvars);
        if c.is_zero() {
            return out;
        }
        out.terms = self.terms.iter().map(|(k, a)| (k.clone(), a * c)).collect();
        out
    }

    pub fn mul_poly(&self, p: &Polynomial) -> ModuleElement {
        let mut out = ModuleElement::zero(self.rank, self.nvars);
        for ((i, m), c) in &self.terms {
            for (pm, pc) in p.terms() {
                out.add_term(*i, m.mul(pm), c * pc);
            }
        }
        out
    }

    /// Direct sum `self ⊕ other` in `R^(rank + other.rank)`.
    pub fn concat(&self, other: &ModuleElement) -> ModuleElement {
        let mut out = self.clone();
        out.rank += other.rank;
        for ((i, m), c) in &other.terms {
            out.terms.insert((i + self.rank, m.clone()), c.clone());
        }
        out
    }

    /// Splits into the first `at` components and the rest.
    pub fn split(&self, at: usize) -> (ModuleElement, ModuleElement) {
        let mut head = ModuleElement::zero(at, self.nvars);
        let mut tail = ModuleElement::zero(self.rank - at, self.nvars);
        for ((i, m), c) in &self.terms {
            if *i < at {
                head.terms.insert((*i, m.clone()), c.clone());
            } else {
                tail.terms.insert((*i - at, m.clone()), c.clone());
            }
        }
        (head, tail)
    }
}

/// The order-maximal term of a nonzero module element.
pub fn module_leading_term(
    m: &ModuleElement,
    order: &MonomialOrder,
) -> Result<(usize, Monomial, Rational), AlgebraError> {
    m.leading_term(order)
        .map(|(i, mono, c)| (i, mono.clone(), c.clone()))
        .ok_or(AlgebraError::ZeroElement)
}

use std::cmp::Ordering;

use super::Monomial;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BaseOrder {
    DegRevLex,
    Lex,
}

/// How component positions combine with the monomial order on a free module.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModuleExtension {
    /// Compare component positions first.
    PositionOverTerm,
    /// Compare monomials first, positions break ties.
    TermOverPosition,
}

/// A monomial order on a free module `R^s`.
///
/// `priority` lists component indices from highest to lowest. Components not
/// listed rank below all listed ones, in increasing index order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonomialOrder {
    base: BaseOrder,
    extension: ModuleExtension,
    priority: Vec<usize>,
    rank: Vec<usize>,
}

impl MonomialOrder {
    pub fn new(base: BaseOrder, extension: ModuleExtension, priority: Vec<usize>) -> Self {
        let len = priority.iter().map(|&c| c + 1).max().unwrap_or(0);
        let mut rank = vec![usize::MAX; len];
        for (r, &c) in priority.iter().enumerate() {
            assert!(rank[c] == usize::MAX, "component {c} listed twice in priority");
            rank[c] = r;
        }
        MonomialOrder {
            base,
            extension,
            priority,
            rank,
        }
    }

    /// Degree reverse lexicographic, term over position, component 0 highest.
    pub fn degrevlex_top() -> Self {
        Self::new(BaseOrder::DegRevLex, ModuleExtension::TermOverPosition, Vec::new())
    }

    pub fn lex_top() -> Self {
        Self::new(BaseOrder::Lex, ModuleExtension::TermOverPosition, Vec::new())
    }

    pub fn pot(base: BaseOrder) -> Self {
        Self::new(base, ModuleExtension::PositionOverTerm, Vec::new())
    }

    /// Same base order and extension with a different component priority.
    pub fn with_priority(&self, priority: Vec<usize>) -> Self {
        Self::new(self.base, self.extension, priority)
    }

    pub fn base(&self) -> BaseOrder {
        self.base
    }

    pub fn extension(&self) -> ModuleExtension {
        self.extension
    }

    pub fn priority(&self) -> &[usize] {
        &self.priority
    }

    fn component_rank(&self, c: usize) -> (usize, usize) {
        match self.rank.get(c) {
            Some(&r) if r != usize::MAX => (0, r),
            _ => (1, c),
        }
    }

    /// Orders two components; the higher-priority component is `Greater`.
    pub fn cmp_components(&self, a: usize, b: usize) -> Ordering {
        self.component_rank(b).cmp(&self.component_rank(a))
    }

    pub fn cmp_monomials(&self, a: &Monomial, b: &Monomial) -> Ordering {
        let (ea, eb) = (a.exponents(), b.exponents());
        match self.base {
            BaseOrder::Lex => ea.cmp(eb),
            BaseOrder::DegRevLex => a.degree().cmp(&b.degree()).then_with(|| {
                for (x, y) in ea.iter().zip(eb).rev() {
                    if x != y {
                        return y.cmp(x);
                    }
                }
                Ordering::Equal
            }),
        }
    }

    pub fn cmp_terms(&self, a: (usize, &Monomial), b: (usize, &Monomial)) -> Ordering {
        match self.extension {
            ModuleExtension::PositionOverTerm => {
                self.cmp_components(a.0, b.0).then_with(|| self.cmp_monomials(a.1, b.1))
            }
            ModuleExtension::TermOverPosition => {
                self.cmp_monomials(a.1, b.1).then_with(|| self.cmp_components(a.0, b.0))
            }
        }
    }
}

impl Default for MonomialOrder {
    fn default() -> Self {
        Self::degrevlex_top()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(e: &[u32]) -> Monomial {
        Monomial::new(e.to_vec())
    }

    #[test]
    fn degrevlex_examples() {
        let o = MonomialOrder::degrevlex_top();
        // x > y > z, and degree dominates
        assert_eq!(o.cmp_monomials(&m(&[1, 0, 0]), &m(&[0, 1, 0])), Ordering::Greater);
        assert_eq!(o.cmp_monomials(&m(&[0, 0, 2]), &m(&[1, 0, 0])), Ordering::Greater);
        // x*z < y^2 in degrevlex
        assert_eq!(o.cmp_monomials(&m(&[1, 0, 1]), &m(&[0, 2, 0])), Ordering::Less);
    }

    #[test]
    fn lex_examples() {
        let o = MonomialOrder::lex_top();
        assert_eq!(o.cmp_monomials(&m(&[1, 0, 0]), &m(&[0, 5, 5])), Ordering::Greater);
    }

    #[test]
    fn position_priority() {
        let o = MonomialOrder::pot(BaseOrder::DegRevLex).with_priority(vec![2, 0]);
        assert_eq!(o.cmp_components(2, 0), Ordering::Greater);
        assert_eq!(o.cmp_components(0, 1), Ordering::Greater);
        assert_eq!(o.cmp_components(1, 3), Ordering::Greater);
        let one = m(&[0]);
        let x = m(&[3]);
        assert_eq!(o.cmp_terms((2, &one), (0, &x)), Ordering::Greater);
    }
}

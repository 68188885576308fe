//! Buchberger's algorithm for submodules of a free module `R^s` over a
//! commutative polynomial ring, with normal forms, syzygies, membership
//! certificates and submodule equality.
//!
//! Syzygies and cofactors both come from one mechanism: each generator
//! `g_i` is extended by a tag vector `e_i`, and a Gröbner basis of the
//! extended elements is computed under a position-over-term order that
//! ranks every original component above every tag component.

use std::cmp::Ordering;
use std::collections::HashSet;

use num_traits::{One, Zero};

use crate::algebra::{ModuleElement, Monomial, MonomialOrder, Polynomial, Rational};

pub const DEFAULT_PAIR_BUDGET: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum GroebnerError {
    #[error("Gröbner basis computation exceeded the budget of {budget} S-pairs")]
    PairBudgetExceeded { budget: usize },
    #[error("generators live in different free modules: {0}")]
    ModuleMismatch(String),
}

/// A Gröbner basis of a submodule together with the order it was computed for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroebnerBasis {
    elements: Vec<ModuleElement>,
    order: MonomialOrder,
    rank: usize,
    nvars: usize,
    reduced: bool,
}

impl GroebnerBasis {
    pub fn elements(&self) -> &[ModuleElement] {
        &self.elements
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn normal_form(&self, m: &ModuleElement) -> ModuleElement {
        normal_form(m, self)
    }

    pub fn contains(&self, m: &ModuleElement) -> bool {
        self.normal_form(m).is_zero()
    }
}

// Terms kept sorted ascending under the module order, so the leading term
// is the last entry.
#[derive(Clone, Debug)]
struct Vector {
    terms: Vec<(usize, Monomial, Rational)>,
}

impl Vector {
    fn from_element(m: &ModuleElement, order: &MonomialOrder) -> Self {
        let mut terms: Vec<_> = m.terms().map(|(i, mono, c)| (i, mono.clone(), c.clone())).collect();
        terms.sort_by(|a, b| order.cmp_terms((a.0, &a.1), (b.0, &b.1)));
        Vector { terms }
    }

    fn to_element(&self, rank: usize, nvars: usize) -> ModuleElement {
        ModuleElement::from_terms(rank, nvars, self.terms.iter().cloned())
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn lead(&self) -> &(usize, Monomial, Rational) {
        self.terms.last().expect("zero vector has no leading term")
    }

    fn make_monic(&mut self) {
        if let Some((_, _, lc)) = self.terms.last() {
            if !lc.is_one() {
                let inv = lc.recip();
                for t in &mut self.terms {
                    t.2 *= &inv;
                }
            }
        }
    }

    /// `self - c * mono * other`, merging the two sorted term lists.
    fn sub_mul(&self, c: &Rational, mono: &Monomial, other: &Vector, order: &MonomialOrder) -> Vector {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let shifted = other.terms.iter().map(|(i, m, a)| (*i, m.mul(mono), a * c));
        let mut a = self.terms.iter().peekable();
        let mut b = shifted.peekable();
        loop {
            match (a.peek(), b.peek()) {
                (None, None) => break,
                (Some(_), None) => out.push(a.next().unwrap().clone()),
                (None, Some(_)) => {
                    let (i, m, x) = b.next().unwrap();
                    out.push((i, m, -x));
                }
                (Some(x), Some(y)) => match order.cmp_terms((x.0, &x.1), (y.0, &y.1)) {
                    Ordering::Less => out.push(a.next().unwrap().clone()),
                    Ordering::Greater => {
                        let (i, m, v) = b.next().unwrap();
                        out.push((i, m, -v));
                    }
                    Ordering::Equal => {
                        let (i, m, x) = a.next().unwrap().clone();
                        let (_, _, y) = b.next().unwrap();
                        let v = x - y;
                        if !v.is_zero() {
                            out.push((i, m, v));
                        }
                    }
                },
            }
        }
        Vector { terms: out }
    }
}

/// Index of the first basis vector whose leading term divides `(comp, mono)`.
fn find_divisor(basis: &[Vector], comp: usize, mono: &Monomial) -> Option<usize> {
    basis.iter().position(|g| {
        let (gc, gm, _) = g.lead();
        *gc == comp && gm.divides(mono)
    })
}

/// Full reduction: no term of the result is divisible by a leading term of `basis`.
fn reduce(f: &Vector, basis: &[Vector], order: &MonomialOrder) -> Vector {
    let mut f = f.clone();
    let mut done: Vec<(usize, Monomial, Rational)> = Vec::new();
    while let Some((comp, mono, coeff)) = f.terms.last().cloned() {
        match find_divisor(basis, comp, &mono) {
            Some(k) => {
                let g = &basis[k];
                let (_, gm, gc) = g.lead();
                let q = gm.quotient_of(&mono).unwrap();
                f = f.sub_mul(&(coeff / gc), &q, g, order);
            }
            None => {
                done.push(f.terms.pop().unwrap());
            }
        }
    }
    done.reverse();
    Vector { terms: done }
}

fn s_vector_raw(f: &Vector, g: &Vector, order: &MonomialOrder) -> Option<Vector> {
    let (fc, fm, fa) = f.lead();
    let (gc, gm, ga) = g.lead();
    if fc != gc {
        return None;
    }
    let l = fm.lcm(gm);
    let uf = fm.quotient_of(&l).unwrap();
    let ug = gm.quotient_of(&l).unwrap();
    let zero = Vector { terms: Vec::new() };
    let a = zero.sub_mul(&-fa.recip(), &uf, f, order);
    Some(a.sub_mul(&ga.recip(), &ug, g, order))
}

/// The S-vector of two module elements, or `None` when their leading terms
/// sit in different components.
pub fn s_vector(f: &ModuleElement, g: &ModuleElement, order: &MonomialOrder) -> Option<ModuleElement> {
    if f.is_zero() || g.is_zero() {
        return None;
    }
    let fv = Vector::from_element(f, order);
    let gv = Vector::from_element(g, order);
    s_vector_raw(&fv, &gv, order).map(|v| v.to_element(f.rank(), f.nvars()))
}

/// Normal form of `m` with respect to `basis`, reducing by the basis element
/// of smallest index among all divisors.
pub fn normal_form(m: &ModuleElement, basis: &GroebnerBasis) -> ModuleElement {
    let order = &basis.order;
    let vs: Vec<Vector> = basis.elements.iter().map(|e| Vector::from_element(e, order)).collect();
    reduce(&Vector::from_element(m, order), &vs, order).to_element(m.rank(), m.nvars())
}

fn check_same_module(gens: &[ModuleElement]) -> Result<Option<(usize, usize)>, GroebnerError> {
    let Some(first) = gens.first() else {
        return Ok(None);
    };
    let shape = (first.rank(), first.nvars());
    for g in gens {
        if (g.rank(), g.nvars()) != shape {
            return Err(GroebnerError::ModuleMismatch(format!(
                "rank {} over {} generators vs rank {} over {} generators",
                shape.0,
                shape.1,
                g.rank(),
                g.nvars()
            )));
        }
    }
    Ok(Some(shape))
}

struct Pair {
    i: usize,
    j: usize,
    comp: usize,
    lcm: Monomial,
}

/// Reduced Gröbner basis of the submodule generated by `gens`.
pub fn buchberger(gens: &[ModuleElement], order: &MonomialOrder) -> Result<GroebnerBasis, GroebnerError> {
    buchberger_with_budget(gens, order, DEFAULT_PAIR_BUDGET)
}

/// Like [`buchberger`], but aborts after `budget` S-pairs have been reduced.
pub fn buchberger_with_budget(
    gens: &[ModuleElement],
    order: &MonomialOrder,
    budget: usize,
) -> Result<GroebnerBasis, GroebnerError> {
    let Some((rank, nvars)) = check_same_module(gens)? else {
        return Ok(GroebnerBasis {
            elements: Vec::new(),
            order: order.clone(),
            rank: 0,
            nvars: 0,
            reduced: true,
        });
    };
    let mut basis: Vec<Vector> = Vec::new();
    let mut pairs: Vec<Pair> = Vec::new();
    let mut pending: HashSet<(usize, usize)> = HashSet::new();

    let add = |v: Vector, basis: &mut Vec<Vector>, pairs: &mut Vec<Pair>, pending: &mut HashSet<(usize, usize)>| {
        let j = basis.len();
        let (jc, jm, _) = v.lead().clone();
        for (i, g) in basis.iter().enumerate() {
            let (ic, im, _) = g.lead();
            if *ic != jc {
                continue;
            }
            pairs.push(Pair {
                i,
                j,
                comp: jc,
                lcm: im.lcm(&jm),
            });
            pending.insert((i, j));
        }
        basis.push(v);
    };

    for g in gens {
        let mut v = reduce(&Vector::from_element(g, order), &basis, order);
        if !v.is_zero() {
            v.make_monic();
            add(v, &mut basis, &mut pairs, &mut pending);
        }
    }

    let mut processed = 0usize;
    while !pairs.is_empty() {
        // normal strategy: smallest lcm first, ties by index
        let mut best = 0;
        for k in 1..pairs.len() {
            let (a, b) = (&pairs[k], &pairs[best]);
            let c = order
                .cmp_terms((a.comp, &a.lcm), (b.comp, &b.lcm))
                .then_with(|| (a.j, a.i).cmp(&(b.j, b.i)));
            if c == Ordering::Less {
                best = k;
            }
        }
        let pair = pairs.swap_remove(best);
        pending.remove(&(pair.i, pair.j));

        let (_, im, _) = basis[pair.i].lead();
        let (_, jm, _) = basis[pair.j].lead();
        // The coprime criterion only holds for ideals, not for free modules of rank > 1.
        if rank == 1 && im.is_coprime(jm) {
            continue;
        }
        let key = |a: usize, b: usize| (a.min(b), a.max(b));
        let chain = (0..basis.len()).any(|k| {
            if k == pair.i || k == pair.j {
                return false;
            }
            let (kc, km, _) = basis[k].lead();
            *kc == pair.comp
                && km.divides(&pair.lcm)
                && !pending.contains(&key(pair.i, k))
                && !pending.contains(&key(pair.j, k))
        });
        if chain {
            continue;
        }

        processed += 1;
        if processed > budget {
            return Err(GroebnerError::PairBudgetExceeded { budget });
        }
        let s = s_vector_raw(&basis[pair.i], &basis[pair.j], order).expect("pair components agree");
        let mut r = reduce(&s, &basis, order);
        if !r.is_zero() {
            r.make_monic();
            add(r, &mut basis, &mut pairs, &mut pending);
        }
    }

    Ok(GroebnerBasis {
        elements: interreduce(basis, order)
            .into_iter()
            .map(|v| v.to_element(rank, nvars))
            .collect(),
        order: order.clone(),
        rank,
        nvars,
        reduced: true,
    })
}

/// Minimalizes and fully interreduces a Gröbner basis, then sorts it by
/// descending leading term so equal submodules give identical lists.
fn interreduce(basis: Vec<Vector>, order: &MonomialOrder) -> Vec<Vector> {
    let n = basis.len();
    let mut keep = vec![true; n];
    for i in 0..n {
        let (ic, im, _) = basis[i].lead();
        for j in 0..n {
            if i == j || !keep[j] {
                continue;
            }
            let (jc, jm, _) = basis[j].lead();
            if ic == jc && jm.divides(im) && (jm != im || j < i) {
                keep[i] = false;
                break;
            }
        }
    }
    let minimal: Vec<Vector> = basis
        .into_iter()
        .zip(keep)
        .filter_map(|(v, k)| k.then_some(v))
        .collect();
    let mut out = Vec::with_capacity(minimal.len());
    for (i, v) in minimal.iter().enumerate() {
        let others: Vec<Vector> = minimal
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, w)| w.clone())
            .collect();
        let mut tail = v.clone();
        let lead = tail.terms.pop().unwrap();
        let mut r = reduce(&tail, &others, order);
        r.terms.push(lead);
        r.make_monic();
        out.push(r);
    }
    out.sort_by(|a, b| {
        let (ac, am, _) = a.lead();
        let (bc, bm, _) = b.lead();
        order.cmp_terms((*bc, bm), (*ac, am))
    });
    out
}

/// Gröbner basis of the tagged elements `g_i ⊕ e_i`, used for syzygies and
/// membership certificates.
#[derive(Clone, Debug)]
pub struct TaggedBasis {
    basis: GroebnerBasis,
    rank: usize,
    count: usize,
}

/// Elimination order on `R^(rank + count)`: position over term, original
/// components above tags.
fn elimination_order(base: &MonomialOrder, rank: usize, count: usize) -> MonomialOrder {
    MonomialOrder::new(
        base.base(),
        crate::algebra::ModuleExtension::PositionOverTerm,
        (0..rank + count).collect(),
    )
}

impl TaggedBasis {
    pub fn new(gens: &[ModuleElement], base: &MonomialOrder) -> Result<Self, GroebnerError> {
        Self::with_budget(gens, base, DEFAULT_PAIR_BUDGET)
    }

    pub fn with_budget(gens: &[ModuleElement], base: &MonomialOrder, budget: usize) -> Result<Self, GroebnerError> {
        let Some((rank, nvars)) = check_same_module(gens)? else {
            return Ok(TaggedBasis {
                basis: buchberger(&[], base)?,
                rank: 0,
                count: 0,
            });
        };
        let count = gens.len();
        let tagged: Vec<ModuleElement> = gens
            .iter()
            .enumerate()
            .map(|(i, g)| g.concat(&ModuleElement::unit(count, i, &Polynomial::one(nvars))))
            .collect();
        let order = elimination_order(base, rank, count);
        let basis = buchberger_with_budget(&tagged, &order, budget)?;
        Ok(TaggedBasis { basis, rank, count })
    }

    /// Generators of the syzygy module, as elements of `R^count`.
    pub fn syzygies(&self) -> Vec<ModuleElement> {
        self.basis
            .elements()
            .iter()
            .filter_map(|e| {
                let (head, tail) = e.split(self.rank);
                head.is_zero().then_some(tail)
            })
            .collect()
    }

    /// Cofactors `c` with `m = Σ c_i g_i`, or `None` if `m` is not in the submodule.
    pub fn cofactors(&self, m: &ModuleElement) -> Option<Vec<Polynomial>> {
        if self.count == 0 {
            return m.is_zero().then(Vec::new);
        }
        let lifted = m.concat(&ModuleElement::zero(self.count, m.nvars()));
        let r = self.basis.normal_form(&lifted);
        let (head, tail) = r.split(self.rank);
        head.is_zero().then(|| tail.neg().components())
    }
}

/// Generators of `{c : Σ c_i gens_i = 0}`; the result is the reduced Gröbner
/// basis of the syzygy module under the induced elimination order.
pub fn syzygy_basis(gens: &[ModuleElement]) -> Result<Vec<ModuleElement>, GroebnerError> {
    syzygy_basis_with_order(gens, &MonomialOrder::default())
}

pub fn syzygy_basis_with_order(
    gens: &[ModuleElement],
    base: &MonomialOrder,
) -> Result<Vec<ModuleElement>, GroebnerError> {
    Ok(TaggedBasis::new(gens, base)?.syzygies())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Membership {
    pub member: bool,
    /// `m = Σ cofactors_i gens_i` when `member` holds.
    pub cofactors: Option<Vec<Polynomial>>,
}

pub fn submodule_membership(m: &ModuleElement, gens: &[ModuleElement]) -> Result<Membership, GroebnerError> {
    if gens.is_empty() {
        return Ok(Membership {
            member: m.is_zero(),
            cofactors: m.is_zero().then(Vec::new),
        });
    }
    check_same_module(&[gens, std::slice::from_ref(m)].concat())?;
    let cofactors = TaggedBasis::new(gens, &MonomialOrder::default())?.cofactors(m);
    Ok(Membership {
        member: cofactors.is_some(),
        cofactors,
    })
}

/// Whether two generating sets span the same submodule.
pub fn module_equal(a: &[ModuleElement], b: &[ModuleElement]) -> Result<bool, GroebnerError> {
    module_equal_with_order(a, b, &MonomialOrder::default())
}

pub fn module_equal_with_order(
    a: &[ModuleElement],
    b: &[ModuleElement],
    order: &MonomialOrder,
) -> Result<bool, GroebnerError> {
    let ga = buchberger(a, order)?;
    let gb = buchberger(b, order)?;
    Ok(ga.elements == gb.elements)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{BaseOrder, Ring};

    fn ring() -> Ring {
        Ring::new(["d1", "d2", "d3"]).unwrap()
    }

    fn scalars(r: &Ring, polys: &[&str]) -> Vec<ModuleElement> {
        polys
            .iter()
            .map(|s| ModuleElement::unit(1, 0, &r.parse(s).unwrap()))
            .collect()
    }

    #[test]
    fn normal_form_examples() {
        let r = ring();
        let g = buchberger(&scalars(&r, &["d1"]), &MonomialOrder::default()).unwrap();
        assert!(g.normal_form(&scalars(&r, &["d1^2"])[0]).is_zero());

        let g = buchberger(&scalars(&r, &["d1", "d2"]), &MonomialOrder::default()).unwrap();
        let one = scalars(&r, &["1"]).remove(0);
        assert_eq!(g.normal_form(&one), one);
        for e in g.elements() {
            assert!(g.normal_form(e).is_zero());
        }
    }

    #[test]
    fn principal_and_trivial_bases() {
        let r = Ring::new(["x"]).unwrap();
        let g = buchberger(&scalars(&r, &["x"]), &MonomialOrder::default()).unwrap();
        assert_eq!(g.elements(), scalars(&r, &["x"]).as_slice());

        let r = ring();
        let g = buchberger(&scalars(&r, &["d1", "d2"]), &MonomialOrder::default()).unwrap();
        assert_eq!(g.elements(), scalars(&r, &["d1", "d2"]).as_slice());
    }

    #[test]
    fn classic_ideal_basis() {
        // x^2 - y, x^3 - x under lex with x > y: the reduced basis is {x*y - x, x^2 - y, y^2 - y}
        let r = Ring::new(["x", "y"]).unwrap();
        let g = buchberger(&scalars(&r, &["x^2 - y", "x^3 - x"]), &MonomialOrder::lex_top()).unwrap();
        let expect = scalars(&r, &["x^2 - y", "x*y - x", "y^2 - y"]);
        assert_eq!(g.len(), 3);
        for e in &expect {
            assert!(g.elements().contains(e), "missing {e:?}");
        }
    }

    #[test]
    fn empty_generators() {
        let g = buchberger(&[], &MonomialOrder::default()).unwrap();
        assert!(g.is_empty());
        assert!(syzygy_basis(&[]).unwrap().is_empty());
    }

    #[test]
    fn unit_has_no_syzygies() {
        let r = ring();
        assert!(syzygy_basis(&scalars(&r, &["1"])).unwrap().is_empty());
    }

    #[test]
    fn divergence_syzygies_match_curl() {
        let r = ring();
        let gens = scalars(&r, &["d1", "d2", "d3"]);
        let syz = syzygy_basis(&gens).unwrap();
        let curl: Vec<ModuleElement> = [["-d2", "d1", "0"], ["0", "-d3", "d2"], ["-d3", "0", "d1"]]
            .iter()
            .map(|c| ModuleElement::from_components(3, &c.map(|s| r.parse(s).unwrap())))
            .collect();
        assert!(module_equal(&syz, &curl).unwrap());
    }

    #[test]
    fn membership_and_cofactors() {
        let r = ring();
        let gens = scalars(&r, &["d1", "d2"]);
        let one = scalars(&r, &["1"]).remove(0);
        assert!(!submodule_membership(&one, &gens).unwrap().member);

        let m = scalars(&r, &["d1*d3 + 2*d2^2"]).remove(0);
        let res = submodule_membership(&m, &gens).unwrap();
        assert!(res.member);
        let c = res.cofactors.unwrap();
        let recombined = &(&c[0] * &r.parse("d1").unwrap()) + &(&c[1] * &r.parse("d2").unwrap());
        assert_eq!(recombined, r.parse("d1*d3 + 2*d2^2").unwrap());

        let res = submodule_membership(&gens[1], &gens).unwrap();
        assert!(res.member);
        let c = res.cofactors.unwrap();
        assert!(c[0].is_zero() && c[1].is_one());
    }

    #[test]
    fn module_equality_examples() {
        let r = ring();
        assert!(!module_equal(&scalars(&r, &["d1"]), &scalars(&r, &["d1^2"])).unwrap());
        assert!(module_equal(&scalars(&r, &["d1", "d2 + d1"]), &scalars(&r, &["-3*d2", "1/2*d1"])).unwrap());
    }

    #[test]
    fn pair_budget_is_enforced() {
        let r = Ring::new(["x", "y", "z"]).unwrap();
        let gens = scalars(&r, &["x^2*y - z^3", "x*y^2 - z", "x*z - y^3"]);
        assert_eq!(
            buchberger_with_budget(&gens, &MonomialOrder::default(), 1),
            Err(GroebnerError::PairBudgetExceeded { budget: 1 })
        );
    }

    #[test]
    fn mismatched_modules() {
        let a = ModuleElement::unit(2, 0, &Polynomial::one(1));
        let b = ModuleElement::unit(3, 0, &Polynomial::one(1));
        assert!(matches!(
            buchberger(&[a, b], &MonomialOrder::pot(BaseOrder::Lex)),
            Err(GroebnerError::ModuleMismatch(_))
        ));
    }
}

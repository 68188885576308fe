//! Parametrizations of solution sets: `B = rker(A)`, `A' = lker(B)`, and
//! the decision whether `B` parametrizes every solution of `A`.
//!
//! `B` always satisfies `A·B = 0`. It parametrizes all of `sol(A)` exactly
//! when the rows of `A'` lie in the row module of `A`; otherwise `A'`
//! describes the largest parametrizable subsystem. The generators chosen
//! for `B` are not canonical, so comparisons should go through
//! [`module_equal`](crate::groebner::module_equal).

use crate::algebra::{ModuleElement, MonomialOrder, OperatorMatrix, Polynomial};
use crate::groebner::{self, GroebnerError, TaggedBasis};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParametrizationReport {
    /// Right kernel of `A`.
    pub b: OperatorMatrix,
    /// Left kernel of `B`.
    pub a_prime: OperatorMatrix,
    pub parametrizable: bool,
    /// Row `i` holds cofactors expressing row `i` of `A'` in the rows of `A`.
    pub certificates: Option<Vec<Vec<Polynomial>>>,
}

/// Drops generators that lie in the submodule generated by the remaining ones.
pub fn prune_generators(gens: Vec<ModuleElement>, order: &MonomialOrder) -> Result<Vec<ModuleElement>, GroebnerError> {
    let mut kept: Vec<ModuleElement> = gens.into_iter().filter(|g| !g.is_zero()).collect();
    let mut i = kept.len();
    while i > 0 {
        i -= 1;
        let others: Vec<ModuleElement> = kept
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, g)| g.clone())
            .collect();
        if others.is_empty() {
            break;
        }
        if groebner::buchberger(&others, order)?.contains(&kept[i]) {
            kept.remove(i);
        }
    }
    Ok(kept)
}

pub fn right_kernel(a: &OperatorMatrix) -> Result<OperatorMatrix, GroebnerError> {
    right_kernel_with_order(a, &MonomialOrder::default())
}

/// Columns generating `{m : A m = 0}`, with redundant generators removed.
pub fn right_kernel_with_order(a: &OperatorMatrix, order: &MonomialOrder) -> Result<OperatorMatrix, GroebnerError> {
    let syz = groebner::syzygy_basis_with_order(&a.columns(), order)?;
    let gens = prune_generators(syz, order)?;
    Ok(OperatorMatrix::from_columns(a.ring().clone(), a.ncols(), &gens))
}

pub fn left_kernel(b: &OperatorMatrix) -> Result<OperatorMatrix, GroebnerError> {
    left_kernel_with_order(b, &MonomialOrder::default())
}

/// Rows generating `{m : m B = 0}`; the right kernel of the transpose,
/// which is valid because the ring is commutative.
pub fn left_kernel_with_order(b: &OperatorMatrix, order: &MonomialOrder) -> Result<OperatorMatrix, GroebnerError> {
    Ok(right_kernel_with_order(&b.transpose(), order)?.transpose())
}

pub fn check_parametrizable(a: &OperatorMatrix) -> Result<ParametrizationReport, GroebnerError> {
    check_parametrizable_with_order(a, &MonomialOrder::default())
}

pub fn check_parametrizable_with_order(
    a: &OperatorMatrix,
    order: &MonomialOrder,
) -> Result<ParametrizationReport, GroebnerError> {
    let b = right_kernel_with_order(a, order)?;
    let a_prime = left_kernel_with_order(&b, order)?;
    let rows_a = a.rows();
    let tagged = TaggedBasis::new(&rows_a, order)?;
    let mut certificates = Vec::with_capacity(a_prime.nrows());
    let mut parametrizable = true;
    for row in a_prime.rows() {
        let cof = if rows_a.is_empty() {
            row.is_zero().then(Vec::new)
        } else {
            tagged.cofactors(&row)
        };
        match cof {
            Some(c) => certificates.push(c),
            None => {
                parametrizable = false;
                break;
            }
        }
    }
    Ok(ParametrizationReport {
        b,
        a_prime,
        parametrizable,
        certificates: parametrizable.then_some(certificates),
    })
}

/// `A'`, the constraints of the largest parametrizable subsystem of `A`.
pub fn controllable_part(a: &OperatorMatrix) -> Result<OperatorMatrix, GroebnerError> {
    left_kernel(&right_kernel(a)?)
}

use rayon::prelude::*;

use super::{KernelError, KernelExpr, KernelVars, Laurent, MatrixKernel, Side};
use crate::algebra::{Action, OperatorMatrix, Polynomial, Rational, Ring};
use crate::ore::{OreMatrix, SkewPoly};

/// Applies the operator `op` of `ring` to `expr` in the chosen argument.
/// Generators are applied right to left in printed order.
pub fn apply_operator(
    expr: &KernelExpr,
    op: &Polynomial,
    ring: &Ring,
    vars: &KernelVars,
    side: Side,
) -> Result<KernelExpr, KernelError> {
    if op.nvars() != ring.nvars() {
        return Err(KernelError::DimensionMismatch(format!(
            "operator has {} generators, ring has {}",
            op.nvars(),
            ring.nvars()
        )));
    }
    if ring.dim() > vars.dim() {
        return Err(KernelError::DimensionMismatch(format!(
            "ring acts on {} coordinates, kernel has {}",
            ring.dim(),
            vars.dim()
        )));
    }
    let mut out = KernelExpr::zero(expr.nvars());
    for (m, c) in op.terms() {
        let mut e = expr.clone();
        for (g, &k) in m.exponents().iter().enumerate().rev() {
            for _ in 0..k {
                e = act(&e, ring.actions()[g], ring.shift_step(), vars, side)?;
            }
        }
        out = out.add(&e.scale(c));
    }
    Ok(out)
}

fn act(e: &KernelExpr, a: Action, step: &Rational, vars: &KernelVars, side: Side) -> Result<KernelExpr, KernelError> {
    let v = vars.index(a.coordinate(), side);
    match a {
        Action::Differentiate(_) => Ok(e.derivative(v)),
        Action::Multiply(_) => Ok(e.mul_var(v)),
        Action::Shift(_) => e.shift(v, step),
    }
}

/// Applies `Σ r_k(t) ∂^k` on coordinate `coord`; each `r_k` must have a
/// monomial denominator.
pub fn apply_skew(
    expr: &KernelExpr,
    op: &SkewPoly,
    coord: usize,
    vars: &KernelVars,
    side: Side,
) -> Result<KernelExpr, KernelError> {
    let v = vars.index(coord, side);
    let n = expr.nvars();
    let mut out = KernelExpr::zero(n);
    let mut deriv = expr.clone();
    for (k, r) in op.coeffs().iter().enumerate() {
        if k > 0 {
            deriv = deriv.derivative(v);
        }
        if r.is_zero() {
            continue;
        }
        let m = r.den().as_power().ok_or_else(|| {
            KernelError::Unsupported("coefficient denominators must be powers of the variable".into())
        })?;
        let mut coeff = Laurent::zero(n);
        for (j, c) in r.num().coeffs().iter().enumerate() {
            let mut e = vec![0; n];
            e[v] = j as i32 - m as i32;
            coeff.add_term(e, c.clone());
        }
        out = out.add(&deriv.mul_laurent(&coeff));
    }
    Ok(out)
}

/// A matrix of operators that can act on covariance expressions.
pub trait KernelOperator: Sync {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    fn entry_is_zero(&self, i: usize, j: usize) -> bool;
    fn apply_entry(
        &self,
        i: usize,
        j: usize,
        expr: &KernelExpr,
        vars: &KernelVars,
        side: Side,
    ) -> Result<KernelExpr, KernelError>;
}

impl KernelOperator for OperatorMatrix {
    fn nrows(&self) -> usize {
        OperatorMatrix::nrows(self)
    }

    fn ncols(&self) -> usize {
        OperatorMatrix::ncols(self)
    }

    fn entry_is_zero(&self, i: usize, j: usize) -> bool {
        self.get(i, j).is_zero()
    }

    fn apply_entry(
        &self,
        i: usize,
        j: usize,
        expr: &KernelExpr,
        vars: &KernelVars,
        side: Side,
    ) -> Result<KernelExpr, KernelError> {
        apply_operator(expr, self.get(i, j), self.ring(), vars, side)
    }
}

/// An Ore operator matrix acting on coordinate `coordinate`.
#[derive(Clone, Debug)]
pub struct OreOperator {
    pub matrix: OreMatrix,
    pub coordinate: usize,
}

impl KernelOperator for OreOperator {
    fn nrows(&self) -> usize {
        self.matrix.nrows()
    }

    fn ncols(&self) -> usize {
        self.matrix.ncols()
    }

    fn entry_is_zero(&self, i: usize, j: usize) -> bool {
        self.matrix.get(i, j).is_zero()
    }

    fn apply_entry(
        &self,
        i: usize,
        j: usize,
        expr: &KernelExpr,
        vars: &KernelVars,
        side: Side,
    ) -> Result<KernelExpr, KernelError> {
        apply_skew(expr, self.matrix.get(i, j), self.coordinate, vars, side)
    }
}

/// `B k B'ᵀ`: entry `(i, j)` is `Σ_{c,c'} B_ic B'_jc' k_cc'`.
pub fn pushforward_covariance<B: KernelOperator + ?Sized>(
    b: &B,
    k: &MatrixKernel,
) -> Result<MatrixKernel, KernelError> {
    if b.ncols() != k.size() {
        return Err(KernelError::DimensionMismatch(format!(
            "operator has {} columns, kernel has {} components",
            b.ncols(),
            k.size()
        )));
    }
    let vars = k.vars();
    let n = b.nrows();
    let l = k.size();
    // B_ic acting on the unprimed side of row c of k, for every i and c'
    let left: Vec<KernelExpr> = (0..n * l)
        .into_par_iter()
        .map(|ic2| {
            let (i, c2) = (ic2 / l, ic2 % l);
            let mut acc = KernelExpr::zero(vars.nvars());
            for c in 0..l {
                if b.entry_is_zero(i, c) || k.get(c, c2).is_zero() {
                    continue;
                }
                acc = acc.add(&b.apply_entry(i, c, k.get(c, c2), vars, Side::Unprimed)?);
            }
            Ok(acc)
        })
        .collect::<Result<_, KernelError>>()?;
    let entries = (0..n * n)
        .into_par_iter()
        .map(|ij| {
            let (i, j) = (ij / n, ij % n);
            let mut acc = KernelExpr::zero(vars.nvars());
            for c2 in 0..l {
                let inner = &left[i * l + c2];
                if b.entry_is_zero(j, c2) || inner.is_zero() {
                    continue;
                }
                acc = acc.add(&b.apply_entry(j, c2, inner, vars, Side::Primed)?);
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>, KernelError>>()?;
    Ok(MatrixKernel::new(vars.clone(), n, entries))
}

/// True iff `A` applied in the first argument annihilates every column of `K`.
pub fn annihilation_check<A: KernelOperator + ?Sized>(a: &A, k: &MatrixKernel) -> bool {
    if a.ncols() != k.size() {
        return false;
    }
    let l = k.size();
    (0..a.nrows() * l).into_par_iter().all(|ij| {
        let (i, j) = (ij / l, ij % l);
        let mut acc = KernelExpr::zero(k.vars().nvars());
        for c in 0..l {
            if a.entry_is_zero(i, c) || k.get(c, j).is_zero() {
                continue;
            }
            match a.apply_entry(i, c, k.get(c, j), k.vars(), Side::Unprimed) {
                Ok(e) => acc = acc.add(&e),
                Err(_) => return false,
            }
        }
        acc.is_zero()
    })
}

use twofloat::TwoFloat;

use crate::algebra::{rational_from_f64, rational_to_f64, Rational};

use super::{KernelExpr, MatrixKernel};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("denominator vanishes at the evaluation point (variable {var})")]
    Pole { var: usize },
    #[error("component {component} out of range for a {size}x{size} kernel")]
    Component { component: usize, size: usize },
    #[error("point has {got} coordinates, expected {expected}")]
    Dimension { got: usize, expected: usize },
}

#[derive(Clone, Debug)]
struct Term {
    coeff: TwoFloat,
    powers: Vec<(usize, i32)>,
}

#[derive(Clone, Debug)]
struct Group {
    arg: Vec<Term>,
    pre: Vec<Term>,
}

#[derive(Clone, Debug, Default)]
struct CompiledExpr {
    groups: Vec<Group>,
}

/// Coefficient as an unevaluated sum `hi + lo`.
fn two_float(c: &Rational) -> TwoFloat {
    let hi = rational_to_f64(c);
    let lo = rational_from_f64(hi).map_or(0.0, |h| rational_to_f64(&(c - h)));
    TwoFloat::new_add(hi, lo)
}

// Expanded prefactors cancel heavily, so sums are carried in double-double.
fn eval_terms(terms: &[Term], z: &[f64]) -> Result<TwoFloat, EvalError> {
    let mut s = TwoFloat::from(0.0);
    for t in terms {
        let mut v = t.coeff;
        for &(var, k) in &t.powers {
            if k < 0 && z[var] == 0.0 {
                return Err(EvalError::Pole { var });
            }
            v *= TwoFloat::from(z[var]).powi(k);
        }
        s += v;
    }
    Ok(s)
}

impl CompiledExpr {
    fn new(e: &KernelExpr) -> Self {
        let to_terms = |it: &mut dyn Iterator<Item = (Vec<i32>, TwoFloat)>| -> Vec<Term> {
            it.map(|(e, coeff)| Term {
                coeff,
                powers: e
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k != 0)
                    .map(|(v, &k)| (v, k))
                    .collect(),
            })
            .collect()
        };
        let groups = e
            .groups()
            .map(|(arg, pre)| Group {
                arg: to_terms(
                    &mut arg
                        .terms()
                        .map(|(m, c)| (m.exponents().iter().map(|&k| k as i32).collect(), two_float(c))),
                ),
                pre: to_terms(&mut pre.terms().map(|(e, c)| (e.clone(), two_float(c)))),
            })
            .collect();
        CompiledExpr { groups }
    }

    fn eval(&self, z: &[f64]) -> Result<f64, EvalError> {
        let mut s = 0.0;
        for g in &self.groups {
            let p = f64::from(eval_terms(&g.pre, z)?);
            let a = f64::from(eval_terms(&g.arg, z)?);
            s += p * a.exp();
        }
        Ok(s)
    }
}

/// Double-precision evaluator for a [`MatrixKernel`]; pure and shareable
/// across threads.
#[derive(Clone, Debug)]
pub struct CompiledKernel {
    dim: usize,
    size: usize,
    entries: Vec<CompiledExpr>,
}

impl CompiledKernel {
    pub fn new(k: &MatrixKernel) -> Self {
        CompiledKernel {
            dim: k.vars().dim(),
            size: k.size(),
            entries: k.entries().iter().map(CompiledExpr::new).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// `K(x, x')_{i, j}`
    pub fn eval(&self, x: &[f64], i: usize, xp: &[f64], j: usize) -> Result<f64, EvalError> {
        for p in [x, xp] {
            if p.len() != self.dim {
                return Err(EvalError::Dimension {
                    got: p.len(),
                    expected: self.dim,
                });
            }
        }
        for c in [i, j] {
            if c >= self.size {
                return Err(EvalError::Component {
                    component: c,
                    size: self.size,
                });
            }
        }
        let mut z = Vec::with_capacity(2 * self.dim);
        z.extend_from_slice(x);
        z.extend_from_slice(xp);
        self.entries[i * self.size + j].eval(&z)
    }
}

pub fn compile_evaluator(k: &MatrixKernel) -> CompiledKernel {
    CompiledKernel::new(k)
}

//! Finite-difference application of operator matrices to numeric fields.

use rayon::prelude::*;
use syzygp_core::algebra::{rational_to_f64, Action};
use syzygp_core::ore::{SkewPoly, UniPoly};

use crate::problem::System;

/// A vector field `f(x)[c]`.
pub trait Field: Sync {
    fn eval(&self, x: &[f64], component: usize) -> f64;
}

impl<F: Fn(&[f64], usize) -> f64 + Sync> Field for F {
    fn eval(&self, x: &[f64], component: usize) -> f64 {
        self(x, component)
    }
}

fn horner(p: &UniPoly, t: f64) -> f64 {
    p.coeffs().iter().rev().fold(0.0, |acc, c| acc * t + rational_to_f64(c))
}

fn moved(x: &[f64], c: usize, by: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    y[c] += by;
    y
}

/// Applies `actions` (outermost first) to `g` at `x`.
fn apply_actions(actions: &[Action], step: f64, h: f64, g: &dyn Fn(&[f64]) -> f64, x: &[f64]) -> f64 {
    let Some((&first, rest)) = actions.split_first() else {
        return g(x);
    };
    let inner = |y: &[f64]| apply_actions(rest, step, h, g, y);
    match first {
        Action::Differentiate(c) => (inner(&moved(x, c, h)) - inner(&moved(x, c, -h))) / (2.0 * h),
        Action::Multiply(c) => x[c] * inner(x),
        Action::Shift(c) => inner(&moved(x, c, step)),
    }
}

fn nth_difference(k: usize, c: usize, h: f64, g: &dyn Fn(&[f64]) -> f64, x: &[f64]) -> f64 {
    if k == 0 {
        return g(x);
    }
    (nth_difference(k - 1, c, h, g, &moved(x, c, h)) - nth_difference(k - 1, c, h, g, &moved(x, c, -h))) / (2.0 * h)
}

fn apply_skew(p: &SkewPoly, c: usize, h: f64, g: &dyn Fn(&[f64]) -> f64, x: &[f64]) -> f64 {
    p.coeffs()
        .iter()
        .enumerate()
        .filter(|(_, r)| !r.is_zero())
        .map(|(k, r)| horner(r.num(), x[c]) / horner(r.den(), x[c]) * nth_difference(k, c, h, g, x))
        .sum()
}

/// Row `i` of the system applied to `f` at `x`, with central differences of step `h`.
pub fn apply_row(system: &System, i: usize, f: &dyn Field, x: &[f64], h: f64) -> f64 {
    let mut total = 0.0;
    for j in 0..system.ncols() {
        let g = |y: &[f64]| f.eval(y, j);
        total += match system {
            System::Polynomial(m) => {
                let ring = m.ring();
                let step = rational_to_f64(ring.shift_step());
                m.get(i, j)
                    .terms()
                    .map(|(mono, coeff)| {
                        let actions: Vec<Action> = mono
                            .exponents()
                            .iter()
                            .enumerate()
                            .flat_map(|(gen, &k)| std::iter::repeat_n(ring.actions()[gen], k as usize))
                            .collect();
                        rational_to_f64(coeff) * apply_actions(&actions, step, h, &g, x)
                    })
                    .sum::<f64>()
            }
            System::Ore { matrix, coordinate, .. } => apply_skew(matrix.get(i, j), *coordinate, h, &g, x),
        };
    }
    total
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Residual {
    /// Largest `|(A f)_i(x)|` over rows and points.
    pub max_residual: f64,
    /// Largest `|f_c(x)|` over components and points.
    pub max_field: f64,
}

impl Residual {
    pub fn relative(&self) -> f64 {
        if self.max_field == 0.0 {
            self.max_residual
        } else {
            self.max_residual / self.max_field
        }
    }
}

pub fn residual(system: &System, f: &dyn Field, points: &[Vec<f64>], h: f64) -> Residual {
    let (max_residual, max_field) = points
        .par_iter()
        .map(|x| {
            let r = (0..system.nrows())
                .map(|i| apply_row(system, i, f, x, h).abs())
                .fold(0.0, f64::max);
            let m = (0..system.ncols()).map(|c| f.eval(x, c).abs()).fold(0.0, f64::max);
            (r, m)
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
    Residual {
        max_residual,
        max_field,
    }
}

/// Cartesian product of `n` evenly spaced values per box side, first coordinate slowest.
pub fn grid(bounds: &[(f64, f64)], n: usize) -> Vec<Vec<f64>> {
    let axes: Vec<Vec<f64>> = bounds
        .iter()
        .map(|&(lo, hi)| {
            if n == 1 {
                vec![(lo + hi) / 2.0]
            } else {
                (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
            }
        })
        .collect();
    cartesian(&axes)
}

pub fn cartesian(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new()];
    for axis in axes {
        out = out
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out
}

//! Independent oracles shared by integration tests.
#![allow(dead_code)]

use num_traits::{One, Zero};
use rand::Rng;
use syzygp_core::algebra::{ModuleElement, Monomial, OperatorMatrix, Polynomial, Rational, Ring};

pub fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// All monomials in `nvars` variables of total degree at most `deg`.
pub fn monomials_up_to(nvars: usize, deg: u32) -> Vec<Monomial> {
    fn rec(nvars: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if cur.len() == nvars {
            out.push(Monomial::new(cur.clone()));
            return;
        }
        for e in 0..=left {
            cur.push(e);
            rec(nvars, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(nvars, deg, &mut Vec::new(), &mut out);
    out
}

/// Basis of `{v : M v = 0}` by Gauss-Jordan elimination over ℚ.
pub fn nullspace(mut m: Vec<Vec<Rational>>, ncols: usize) -> Vec<Vec<Rational>> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].recip();
        for x in m[row].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[row].clone();
        for (r, other) in m.iter_mut().enumerate() {
            if r != row && !other[col].is_zero() {
                let f = other[col].clone();
                for (x, p) in other.iter_mut().zip(&pivot_row) {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); ncols];
            v[f] = Rational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[r][f].clone();
            }
            v
        })
        .collect()
}

/// Every syzygy of `a`'s columns whose entries have degree at most `deg`,
/// as a ℚ-basis of that finite-dimensional space.
pub fn brute_force_syzygies(a: &OperatorMatrix, deg: u32) -> Vec<ModuleElement> {
    let nvars = a.ring().nvars();
    let (m, n) = (a.nrows(), a.ncols());
    let monos = monomials_up_to(nvars, deg);
    let nunk = n * monos.len();
    let mut eq_index = std::collections::BTreeMap::new();
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for j in 0..n {
        for (k, mono) in monos.iter().enumerate() {
            let unknown = j * monos.len() + k;
            for i in 0..m {
                for (am, c) in a.get(i, j).terms() {
                    let key = (i, am.mul(mono));
                    let r = *eq_index.entry(key).or_insert_with(|| {
                        rows.push(vec![Rational::zero(); nunk]);
                        rows.len() - 1
                    });
                    rows[r][unknown] += c;
                }
            }
        }
    }
    nullspace(rows, nunk)
        .into_iter()
        .map(|v| {
            let comps: Vec<Polynomial> = (0..n)
                .map(|j| {
                    Polynomial::from_terms(
                        nvars,
                        monos
                            .iter()
                            .enumerate()
                            .map(|(k, mono)| (mono.clone(), v[j * monos.len() + k].clone())),
                    )
                })
                .collect();
            ModuleElement::from_components(nvars, &comps)
        })
        .collect()
}

/// Random matrix with entries of degree at most 1 and small integer
/// coefficients; about a third of the entries are zero.
pub fn random_linear_matrix<R: Rng>(rng: &mut R) -> OperatorMatrix {
    let nvars = rng.random_range(1..=3);
    let names: Vec<String> = (1..=nvars).map(|i| format!("d{i}")).collect();
    let ring = Ring::new(names).unwrap();
    let (m, n) = (rng.random_range(1..=3), rng.random_range(1..=3));
    let mut mat = OperatorMatrix::zeros(ring, m, n);
    for i in 0..m {
        for j in 0..n {
            if rng.random_bool(1.0 / 3.0) {
                continue;
            }
            let mut p = Polynomial::zero(nvars);
            p.add_term(Monomial::one(nvars), q(rng.random_range(-2..=2)));
            for v in 0..nvars {
                if rng.random_bool(0.5) {
                    p.add_term(Monomial::var(nvars, v), q(rng.random_range(-2..=2)));
                }
            }
            mat.set(i, j, p);
        }
    }
    mat
}

use syzygp_core::kernel::{CompiledKernel, KernelExpr};
use syzygp_core::{KernelVars, MatrixKernel};

fn compile_scalar(vars: &KernelVars, e: &KernelExpr) -> CompiledKernel {
    CompiledKernel::new(&MatrixKernel::new(vars.clone(), 1, vec![e.clone()]))
}

fn eval_scalar(k: &CompiledKernel, z: &[f64]) -> f64 {
    let d = z.len() / 2;
    k.eval(&z[..d], 0, &z[d..], 0).unwrap()
}

/// Largest error of the symbolic derivative of `e` in any variable against
/// a central difference with step `h`, relative to `|exact|`. Exact zeros
/// are measured against `1e-12` times the largest `|exact|` seen for the
/// same variable.
pub fn max_derivative_error(vars: &KernelVars, e: &KernelExpr, points: &[Vec<f64>], h: f64) -> f64 {
    let f = compile_scalar(vars, e);
    let mut worst: f64 = 0.0;
    for v in 0..vars.nvars() {
        let df = compile_scalar(vars, &e.derivative(v));
        let pairs: Vec<(f64, f64)> = points
            .iter()
            .map(|z| {
                let exact = eval_scalar(&df, z);
                let fd = central_difference(|p| eval_scalar(&f, p), z, v, h);
                (exact, fd)
            })
            .collect();
        let scale = pairs.iter().map(|(d, _)| d.abs()).fold(0.0, f64::max);
        if scale == 0.0 {
            worst = worst.max(pairs.iter().map(|(_, fd)| fd.abs()).fold(0.0, f64::max));
            continue;
        }
        for (exact, fd) in pairs {
            worst = worst.max((fd - exact).abs() / exact.abs().max(1e-12 * scale));
        }
    }
    worst
}

/// Central-difference partial derivative of a scalar field.
pub fn central_difference(f: impl Fn(&[f64]) -> f64, x: &[f64], var: usize, h: f64) -> f64 {
    let (mut xp, mut xm) = (x.to_vec(), x.to_vec());
    xp[var] += h;
    xm[var] -= h;
    (f(&xp) - f(&xm)) / (2.0 * h)
}

pub const MAXWELL_ROWS: [&str; 8] = [
    "0, -dz, dy, dt, 0, 0, 0, 0, 0, 0",
    "dz, 0, -dx, 0, dt, 0, 0, 0, 0, 0",
    "-dy, dx, 0, 0, 0, dt, 0, 0, 0, 0",
    "0, 0, 0, dx, dy, dz, 0, 0, 0, 0",
    "-dt, 0, 0, 0, -dz, dy, -1, 0, 0, 0",
    "0, -dt, 0, dz, 0, -dx, 0, -1, 0, 0",
    "0, 0, -dt, -dy, dx, 0, 0, 0, -1, 0",
    "dx, dy, dz, 0, 0, 0, 0, 0, 0, -1",
];

pub fn maxwell_matrix() -> OperatorMatrix {
    OperatorMatrix::parse_rows(Ring::new(["dx", "dy", "dz", "dt"]).unwrap(), &MAXWELL_ROWS).unwrap()
}

pub fn divergence_matrix() -> OperatorMatrix {
    OperatorMatrix::parse_rows(Ring::new(["d1", "d2", "d3"]).unwrap(), &["d1, d2, d3"]).unwrap()
}

/// A constrained example: its kernel and the box its points are drawn from.
pub struct Example {
    pub name: &'static str,
    pub kernel: MatrixKernel,
    pub lo: f64,
    pub hi: f64,
}

fn se_pushforward(b: &dyn syzygp_core::kernel::KernelOperator, coords: &[&str]) -> MatrixKernel {
    use syzygp_core::kernel::{pushforward_covariance, se_kernel};
    let vars = KernelVars::new(coords.iter().copied());
    let se = se_kernel(coords.len(), &Rational::one(), &Rational::one()).unwrap();
    let k = MatrixKernel::diagonal(vars, &vec![se; b.ncols()]);
    pushforward_covariance(b, &k).unwrap()
}

pub fn example_kernels() -> Vec<Example> {
    use syzygp_core::kernel::OreOperator;
    use syzygp_core::ore::{OreMatrix, OreRing};
    use syzygp_core::parametrization::right_kernel;
    let control = OreOperator {
        matrix: OreMatrix::parse_rows(&OreRing::default(), &["1", "1/t^3*dt"]).unwrap(),
        coordinate: 0,
    };
    vec![
        Example {
            name: "divergence-free",
            kernel: se_pushforward(&right_kernel(&divergence_matrix()).unwrap(), &["x", "y", "z"]),
            lo: -2.0,
            hi: 2.0,
        },
        Example {
            name: "maxwell",
            kernel: se_pushforward(&right_kernel(&maxwell_matrix()).unwrap(), &["x", "y", "z", "t"]),
            lo: -2.0,
            hi: 2.0,
        },
        Example {
            name: "control",
            kernel: se_pushforward(&control, &["t"]),
            lo: 0.5,
            hi: 5.0,
        },
    ]
}

pub fn random_points<R: Rng>(rng: &mut R, n: usize, dim: usize, lo: f64, hi: f64) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..dim).map(|_| rng.random_range(lo..hi)).collect())
        .collect()
}

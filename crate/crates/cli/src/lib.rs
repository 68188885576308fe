//! Runs problem files through parametrization, pushforward, fitting and
//! prediction.

pub mod problem;
pub mod residual;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use syzygp_core::algebra::{BaseOrder, MonomialOrder};
use syzygp_core::gp::{self, Conditioned, Dataset, GpError, GpModel, Hyperparameters, Jitter, Query};
use syzygp_core::groebner::GroebnerError;
use syzygp_core::kernel::{
    annihilation_check, pushforward_covariance, se_kernel_f64, CompiledKernel, KernelError, KernelOperator, OreOperator,
};
use syzygp_core::ore::{ore_check_parametrizable, OreMatrix};
use syzygp_core::parametrization::check_parametrizable_with_order;
use syzygp_core::{KernelVars, MatrixKernel, OperatorMatrix};

use crate::problem::{format_number, ProblemError, ProblemSpec, QueryLine, System};
use crate::residual::Field;

pub const REPORT_HEADER: &str = "# syzygp report v1";
pub const KERNEL_HEADER: &str = "# syzygp kernel v1";
pub const FIT_HEADER: &str = "# syzygp fit v1";
pub const CHECK_HEADER: &str = "# syzygp check v1";

pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NOT_PARAMETRIZABLE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("{0}")]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Gp(#[from] GpError),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Command {
    Parametrize,
    Pushforward,
    Fit,
    Predict,
    Check,
}

#[derive(Clone, Debug)]
pub struct Options {
    pub order: BaseOrder,
    /// Overrides the problem's noise.
    pub noise: Option<f64>,
    /// Absolute jitter; overrides the problem's.
    pub jitter: Option<f64>,
    pub seed: u64,
    /// Random points for `check`.
    pub samples: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            order: BaseOrder::DegRevLex,
            noise: None,
            jitter: None,
            seed: 0,
            samples: 200,
        }
    }
}

/// Text artifacts of a run; later stages are `None` when not requested or
/// when the system is not parametrizable.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub parametrizable: bool,
    pub report: String,
    pub kernel: Option<String>,
    pub fit: Option<String>,
    pub csv: Option<String>,
    pub check: Option<String>,
    pub check_passed: bool,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if !self.parametrizable {
            EXIT_NOT_PARAMETRIZABLE
        } else if self.check.is_some() && !self.check_passed {
            EXIT_ERROR
        } else {
            0
        }
    }
}

/// `B` as something that can act on kernels.
pub enum Parametrization {
    Polynomial(OperatorMatrix),
    Ore(OreOperator),
}

impl Parametrization {
    pub fn operator(&self) -> &dyn KernelOperator {
        match self {
            Parametrization::Polynomial(m) => m,
            Parametrization::Ore(o) => o,
        }
    }

    pub fn ncols(&self) -> usize {
        self.operator().ncols()
    }
}

pub struct Parametrized {
    pub b: Parametrization,
    pub parametrizable: bool,
    pub report: String,
}

fn matrix_section(out: &mut String, name: &str, nrows: usize, ncols: usize, rows: &str) {
    let _ = writeln!(out, "[{name}]");
    let _ = writeln!(out, "shape = {nrows}x{ncols}");
    if ncols > 0 {
        out.push_str(rows);
    }
}

pub fn parametrize(spec: &ProblemSpec, order: BaseOrder) -> Result<Parametrized, RunError> {
    let mut report = format!("{REPORT_HEADER}\n");
    match &spec.system {
        System::Polynomial(a) => {
            let order = match order {
                BaseOrder::DegRevLex => MonomialOrder::degrevlex_top(),
                BaseOrder::Lex => MonomialOrder::lex_top(),
            };
            let rep = check_parametrizable_with_order(a, &order)?;
            let _ = writeln!(report, "parametrizable = {}", rep.parametrizable);
            matrix_section(&mut report, "B", rep.b.nrows(), rep.b.ncols(), &rep.b.to_string());
            let ap = &rep.a_prime;
            matrix_section(&mut report, "A'", ap.nrows(), ap.ncols(), &ap.to_string());
            Ok(Parametrized {
                b: Parametrization::Polynomial(rep.b),
                parametrizable: rep.parametrizable,
                report,
            })
        }
        System::Ore {
            ring,
            coordinate,
            matrix,
        } => {
            let rep = ore_check_parametrizable(matrix);
            let _ = writeln!(report, "parametrizable = {}", rep.parametrizable);
            let print = |m: &OreMatrix| m.print(ring);
            matrix_section(&mut report, "B", rep.b.nrows(), rep.b.ncols(), &print(&rep.b));
            matrix_section(
                &mut report,
                "A'",
                rep.a_prime.nrows(),
                rep.a_prime.ncols(),
                &print(&rep.a_prime),
            );
            Ok(Parametrized {
                b: Parametrization::Ore(OreOperator {
                    matrix: rep.b,
                    coordinate: *coordinate,
                }),
                parametrizable: rep.parametrizable,
                report,
            })
        }
    }
}

/// One value per latent component from a list of length 1 or `n`.
fn broadcast(name: &str, v: &[f64], n: usize) -> Result<Vec<f64>, RunError> {
    match v.len() {
        1 => Ok(vec![v[0]; n]),
        len if len == n => Ok(v.to_vec()),
        len => Err(RunError::Invalid(format!(
            "{len} values for `{name}` but B has {n} latent components"
        ))),
    }
}

/// `B k Bᵀ` for a diagonal SE prior with per-component hyperparameters.
pub fn pushforward(
    spec: &ProblemSpec,
    b: &Parametrization,
    lengthscale: &[f64],
    variance: &[f64],
) -> Result<MatrixKernel, RunError> {
    let l = b.ncols();
    let ls = broadcast("lengthscale", lengthscale, l)?;
    let var = broadcast("variance", variance, l)?;
    let blocks = ls
        .iter()
        .zip(&var)
        .map(|(&a, &v)| se_kernel_f64(spec.dim(), a, v))
        .collect::<Result<Vec<_>, _>>()?;
    let k = MatrixKernel::diagonal(KernelVars::new(spec.coordinates.clone()), &blocks);
    Ok(pushforward_covariance(b.operator(), &k)?)
}

fn system_operator(spec: &ProblemSpec) -> Box<dyn KernelOperator + '_> {
    match &spec.system {
        System::Polynomial(a) => Box::new(a.clone()),
        System::Ore { matrix, coordinate, .. } => Box::new(OreOperator {
            matrix: matrix.clone(),
            coordinate: *coordinate,
        }),
    }
}

pub fn kernel_text(k: &MatrixKernel) -> String {
    format!("{KERNEL_HEADER}\nsize = {}\n{}", k.size(), k.print())
}

pub fn dataset(spec: &ProblemSpec) -> Result<Dataset, RunError> {
    let mut d = Dataset::new();
    for o in &spec.data {
        d.push(o.point.clone(), o.component, o.value)?;
    }
    Ok(d)
}

/// Query points in file order; grids enumerate points with the first
/// coordinate slowest and list the requested components at each point.
pub fn queries(spec: &ProblemSpec) -> Vec<Query> {
    let mut out = Vec::new();
    for q in &spec.queries {
        match q {
            QueryLine::Point { component, point } => out.push(Query::new(point.clone(), *component)),
            QueryLine::Grid { components, axes } => {
                let values: Vec<Vec<f64>> = axes.iter().map(|a| a.values()).collect();
                for p in residual::cartesian(&values) {
                    for &c in components {
                        out.push(Query::new(p.clone(), c));
                    }
                }
            }
        }
    }
    out
}

fn noise(spec: &ProblemSpec, opts: &Options) -> f64 {
    opts.noise.or(spec.kernel.noise).unwrap_or(gp::DEFAULT_NOISE)
}

fn jitter(spec: &ProblemSpec, opts: &Options) -> Jitter {
    opts.jitter
        .or(spec.kernel.jitter)
        .map_or_else(Jitter::default, Jitter::Absolute)
}

pub struct Fitted {
    pub model: GpModel,
    pub kernel: MatrixKernel,
    pub text: String,
}

/// Grid search over the `fit_*` candidates by log marginal likelihood.
/// Without candidates the configured hyperparameters are used as is.
pub fn fit(spec: &ProblemSpec, b: &Parametrization, opts: &Options) -> Result<Fitted, RunError> {
    let data = dataset(spec)?;
    let k = &spec.kernel;
    let noise0 = noise(spec, opts);
    let mut text = format!("{FIT_HEADER}\n");
    if !k.has_grid() {
        let kernel = pushforward(spec, b, &k.lengthscale, &k.variance)?;
        let model = GpModel::new(CompiledKernel::new(&kernel))
            .with_noise(noise0)
            .with_jitter(jitter(spec, opts));
        let lml = model.log_marginal_likelihood(&data)?;
        let _ = writeln!(text, "lengthscale = {}", join(&k.lengthscale));
        let _ = writeln!(text, "variance = {}", join(&k.variance));
        let _ = writeln!(text, "noise = {}", format_number(noise0));
        let _ = writeln!(text, "log_marginal_likelihood = {}", format_number(lml));
        return Ok(Fitted { model, kernel, text });
    }
    let scalar = |name: &str, v: &[f64]| -> Result<Vec<f64>, RunError> {
        match v {
            [x] => Ok(vec![*x]),
            _ => Err(RunError::Invalid(format!(
                "`{name}` must be a single value when fitting hyperparameters"
            ))),
        }
    };
    let pick = |grid: &[f64], name: &str, base: &[f64]| {
        if grid.is_empty() {
            scalar(name, base)
        } else {
            Ok(grid.to_vec())
        }
    };
    let ls = pick(&k.fit_lengthscale, "lengthscale", &k.lengthscale)?;
    let var = pick(&k.fit_variance, "variance", &k.variance)?;
    let noises = if opts.noise.is_some() || k.fit_noise.is_empty() {
        vec![noise0]
    } else {
        k.fit_noise.clone()
    };
    let candidates = gp::hyperparameter_grid(&ls, &var, &noises);
    let mut kernels: BTreeMap<(u64, u64), (MatrixKernel, Arc<CompiledKernel>)> = BTreeMap::new();
    for h in &candidates {
        let key = (h.lengthscale.to_bits(), h.variance.to_bits());
        if let std::collections::btree_map::Entry::Vacant(e) = kernels.entry(key) {
            let m = pushforward(spec, b, &[h.lengthscale], &[h.variance])?;
            let c = Arc::new(CompiledKernel::new(&m));
            e.insert((m, c));
        }
    }
    let jit = jitter(spec, opts);
    let result = gp::fit_hyperparameters(&data, &candidates, |h: &Hyperparameters| {
        let (_, c) = &kernels[&(h.lengthscale.to_bits(), h.variance.to_bits())];
        Ok::<_, RunError>(GpModel::new(c.clone()).with_noise(h.noise).with_jitter(jit))
    })?;
    let best = &candidates[result.index];
    let _ = writeln!(text, "lengthscale = {}", format_number(best.lengthscale));
    let _ = writeln!(text, "variance = {}", format_number(best.variance));
    let _ = writeln!(text, "noise = {}", format_number(best.noise));
    let _ = writeln!(text, "[candidates]");
    for (h, s) in candidates.iter().zip(&result.scores) {
        let score = s.map_or_else(|| "failed".to_owned(), format_number);
        let _ = writeln!(
            text,
            "{}, {}, {}: {score}",
            format_number(h.lengthscale),
            format_number(h.variance),
            format_number(h.noise)
        );
    }
    let kernel = kernels
        .remove(&(best.lengthscale.to_bits(), best.variance.to_bits()))
        .map(|(m, _)| m)
        .expect("candidate kernel");
    Ok(Fitted {
        model: result.model,
        kernel,
        text,
    })
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| format_number(*x)).collect::<Vec<_>>().join(", ")
}

/// Posterior mean as a field, for residual checks.
pub struct MeanField<'a>(pub &'a Conditioned);

impl Field for MeanField<'_> {
    fn eval(&self, x: &[f64], component: usize) -> f64 {
        self.0.mean(&Query::new(x.to_vec(), component)).unwrap_or(f64::NAN)
    }
}

/// Annihilation, symmetry and a finite-difference residual of `A` on the
/// posterior mean at random points around the data.
fn check(spec: &ProblemSpec, fitted: &Fitted, opts: &Options) -> Result<(String, bool), RunError> {
    let mut text = format!("{CHECK_HEADER}\n");
    let annihilated = annihilation_check(system_operator(spec).as_ref(), &fitted.kernel);
    let symmetric = fitted.kernel.is_symmetric();
    let cond = fitted.model.condition(&dataset(spec)?)?;
    let bounds = sample_box(spec);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let points: Vec<Vec<f64>> = (0..opts.samples)
        .map(|_| bounds.iter().map(|&(lo, hi)| rng.random_range(lo..=hi)).collect())
        .collect();
    let r = residual::residual(&spec.system, &MeanField(&cond), &points, 1e-3);
    let ok_residual = r.relative() <= 1e-3;
    let _ = writeln!(text, "annihilation = {annihilated}");
    let _ = writeln!(text, "symmetric = {symmetric}");
    let _ = writeln!(text, "seed = {}", opts.seed);
    let _ = writeln!(text, "points = {}", points.len());
    let _ = writeln!(text, "residual = {:e}", r.max_residual);
    let _ = writeln!(text, "field = {:e}", r.max_field);
    let _ = writeln!(text, "relative_residual = {:e}", r.relative());
    let passed = annihilated && symmetric && ok_residual;
    let _ = writeln!(text, "passed = {passed}");
    Ok((text, passed))
}

/// Bounding box of data and queries, padded by one unit; `[-1, 1]` per
/// coordinate when there are none.
fn sample_box(spec: &ProblemSpec) -> Vec<(f64, f64)> {
    let mut pts: Vec<Vec<f64>> = spec.data.iter().map(|d| d.point.clone()).collect();
    pts.extend(queries(spec).into_iter().map(|q| q.point));
    (0..spec.dim())
        .map(|c| {
            let lo = pts.iter().map(|p| p[c]).fold(f64::INFINITY, f64::min);
            let hi = pts.iter().map(|p| p[c]).fold(f64::NEG_INFINITY, f64::max);
            if lo.is_finite() {
                (lo - 1.0, hi + 1.0)
            } else {
                (-1.0, 1.0)
            }
        })
        .map(|(lo, hi)| avoid_poles(spec, lo, hi))
        .collect()
}

// Ore coefficients have denominators t^m; keep samples on the side of zero
// where the data live.
fn avoid_poles(spec: &ProblemSpec, lo: f64, hi: f64) -> (f64, f64) {
    if !matches!(spec.system, System::Ore { .. }) || lo > 0.0 || hi < 0.0 {
        return (lo, hi);
    }
    if hi > -lo {
        (hi.min(1.0) / 10.0, hi)
    } else {
        (lo, lo.max(-1.0) / 10.0)
    }
}

/// Runs `command` and every stage before it.
pub fn run(spec: &ProblemSpec, command: Command, opts: &Options) -> Result<Outcome, RunError> {
    let p = parametrize(spec, opts.order)?;
    let mut out = Outcome {
        parametrizable: p.parametrizable,
        report: p.report,
        ..Outcome::default()
    };
    if command == Command::Parametrize || !p.parametrizable {
        return Ok(out);
    }
    if command == Command::Pushforward {
        let k = pushforward(spec, &p.b, &spec.kernel.lengthscale, &spec.kernel.variance)?;
        out.kernel = Some(kernel_text(&k));
        return Ok(out);
    }
    let fitted = fit(spec, &p.b, opts)?;
    out.kernel = Some(kernel_text(&fitted.kernel));
    out.fit = Some(fitted.text.clone());
    match command {
        Command::Predict => {
            let qs = queries(spec);
            let post = fitted.model.posterior(&dataset(spec)?, &qs)?;
            let mut buf = Vec::new();
            post.write_csv(&qs, &mut buf)?;
            out.csv = Some(String::from_utf8(buf).expect("csv is utf-8"));
        }
        Command::Check => {
            let (text, passed) = check(spec, &fitted, opts)?;
            out.check = Some(text);
            out.check_passed = passed;
        }
        _ => {}
    }
    Ok(out)
}

//! Multi-output Gaussian process regression with per-component
//! observations.

use std::io::Write;
use std::sync::Arc;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rayon::prelude::*;

use crate::kernel::{CompiledKernel, EvalError};

#[derive(Debug, thiserror::Error)]
pub enum GpError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("Cholesky factorization failed after {retries} jitter retries (minimum diagonal pivot {min_pivot:e})")]
    Factorization { retries: usize, min_pivot: f64 },
    #[error("invalid data: {0}")]
    InvalidData(String),
    #[error("no hyperparameter candidate could be evaluated")]
    NoCandidate,
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// An output component evaluated at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct Query {
    pub point: Vec<f64>,
    pub component: usize,
}

impl Query {
    pub fn new(point: Vec<f64>, component: usize) -> Self {
        Query { point, component }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Observation {
    pub point: Vec<f64>,
    pub component: usize,
    pub value: f64,
}

/// Observations of single output components.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Dataset {
    observations: Vec<Observation>,
}

impl Dataset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, point: Vec<f64>, component: usize, value: f64) -> Result<(), GpError> {
        if let Some(first) = self.observations.first() {
            if first.point.len() != point.len() {
                return Err(GpError::InvalidData(format!(
                    "point has {} coordinates, expected {}",
                    point.len(),
                    first.point.len()
                )));
            }
        }
        if !value.is_finite() || point.iter().any(|x| !x.is_finite()) {
            return Err(GpError::InvalidData("non-finite observation".into()));
        }
        self.observations.push(Observation {
            point,
            component,
            value,
        });
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    pub fn values(&self) -> DVector<f64> {
        DVector::from_iterator(self.len(), self.observations.iter().map(|o| o.value))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Jitter {
    Absolute(f64),
    /// Multiple of the mean diagonal of the noise-free Gram matrix.
    Relative(f64),
}

impl Default for Jitter {
    fn default() -> Self {
        Jitter::Relative(1e-8)
    }
}

pub const DEFAULT_NOISE: f64 = 1e-6;
pub const MAX_JITTER_RETRIES: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct Hyperparameters {
    pub lengthscale: f64,
    pub variance: f64,
    pub noise: f64,
}

#[derive(Clone, Debug)]
pub struct GpModel {
    kernel: Arc<CompiledKernel>,
    noise: f64,
    jitter: Jitter,
    hyperparameters: Option<Hyperparameters>,
}

/// A factorized Gram matrix together with the jitter that made it succeed.
#[derive(Clone, Debug)]
struct Factor {
    chol: Cholesky<f64, Dyn>,
    jitter: f64,
}

impl GpModel {
    pub fn new(kernel: impl Into<Arc<CompiledKernel>>) -> Self {
        GpModel {
            kernel: kernel.into(),
            noise: DEFAULT_NOISE,
            jitter: Jitter::default(),
            hyperparameters: None,
        }
    }

    pub fn with_noise(mut self, noise: f64) -> Self {
        assert!(noise >= 0.0, "noise variance must be nonnegative");
        self.noise = noise;
        self
    }

    pub fn with_jitter(mut self, jitter: Jitter) -> Self {
        self.jitter = jitter;
        self
    }

    pub fn with_hyperparameters(mut self, h: Hyperparameters) -> Self {
        self.hyperparameters = Some(h);
        self
    }

    pub fn kernel(&self) -> &CompiledKernel {
        &self.kernel
    }

    pub fn noise(&self) -> f64 {
        self.noise
    }

    pub fn jitter(&self) -> Jitter {
        self.jitter
    }

    pub fn hyperparameters(&self) -> Option<&Hyperparameters> {
        self.hyperparameters.as_ref()
    }

    fn cross(&self, a: &[Query], b: &[Query]) -> Result<DMatrix<f64>, GpError> {
        let vals: Vec<f64> = (0..a.len() * b.len())
            .into_par_iter()
            .map(|ij| {
                let (qa, qb) = (&a[ij / b.len()], &b[ij % b.len()]);
                self.kernel.eval(&qa.point, qa.component, &qb.point, qb.component)
            })
            .collect::<Result<_, _>>()?;
        Ok(DMatrix::from_row_slice(a.len(), b.len(), &vals))
    }

    fn kernel_gram(&self, data: &Dataset) -> Result<DMatrix<f64>, GpError> {
        let q = queries_of(data);
        let mut g = self.cross(&q, &q)?;
        // exact symmetry regardless of evaluation order
        for i in 0..g.nrows() {
            for j in 0..i {
                g[(i, j)] = g[(j, i)];
            }
        }
        Ok(g)
    }

    fn base_jitter(&self, k: &DMatrix<f64>) -> f64 {
        match self.jitter {
            Jitter::Absolute(j) => j,
            Jitter::Relative(r) => r * mean_diagonal(k),
        }
    }

    /// `K(X, X) + (noise + jitter)·I` with the configured jitter.
    pub fn gram(&self, data: &Dataset) -> Result<DMatrix<f64>, GpError> {
        let mut g = self.kernel_gram(data)?;
        let add = self.noise + self.base_jitter(&g);
        for i in 0..g.nrows() {
            g[(i, i)] += add;
        }
        Ok(g)
    }

    fn factor(&self, data: &Dataset) -> Result<Factor, GpError> {
        let k = self.kernel_gram(data)?;
        let mut jitter = self.base_jitter(&k);
        let fallback = 1e-8 * mean_diagonal(&k).max(f64::MIN_POSITIVE);
        let mut min_pivot = f64::NAN;
        for attempt in 0..=MAX_JITTER_RETRIES {
            let mut g = k.clone();
            for i in 0..g.nrows() {
                g[(i, i)] += self.noise + jitter;
            }
            min_pivot = min_diagonal_pivot(&g);
            if let Some(chol) = Cholesky::new(g) {
                return Ok(Factor { chol, jitter });
            }
            if attempt < MAX_JITTER_RETRIES {
                jitter = if jitter > 0.0 { 2.0 * jitter } else { fallback };
            }
        }
        Err(GpError::Factorization {
            retries: MAX_JITTER_RETRIES,
            min_pivot,
        })
    }

    /// Factorizes the Gram matrix of `data` once for repeated prediction.
    pub fn condition(&self, data: &Dataset) -> Result<Conditioned, GpError> {
        let training = queries_of(data);
        let factor = if data.is_empty() {
            None
        } else {
            Some(self.factor(data)?)
        };
        let alpha = match &factor {
            Some(f) => f.chol.solve(&data.values()),
            None => DVector::zeros(0),
        };
        Ok(Conditioned {
            model: self.clone(),
            training,
            factor,
            alpha,
        })
    }

    /// Posterior mean and covariance at `queries`.
    pub fn posterior(&self, data: &Dataset, queries: &[Query]) -> Result<Posterior, GpError> {
        self.condition(data)?.posterior(queries)
    }

    /// `−½ yᵀG⁻¹y − ½ log det G − (n/2) log 2π`
    pub fn log_marginal_likelihood(&self, data: &Dataset) -> Result<f64, GpError> {
        let n = data.len();
        if n == 0 {
            return Ok(0.0);
        }
        let f = self.factor(data)?;
        let y = data.values();
        let alpha = f.chol.solve(&y);
        let log_det: f64 = f.chol.l_dirty().diagonal().iter().map(|d| 2.0 * d.ln()).sum();
        Ok(-0.5 * y.dot(&alpha) - 0.5 * log_det - 0.5 * n as f64 * (2.0 * std::f64::consts::PI).ln())
    }
}

fn queries_of(data: &Dataset) -> Vec<Query> {
    data.observations
        .iter()
        .map(|o| Query::new(o.point.clone(), o.component))
        .collect()
}

fn mean_diagonal(k: &DMatrix<f64>) -> f64 {
    if k.nrows() == 0 {
        0.0
    } else {
        k.diagonal().mean()
    }
}

/// Smallest pivot reached by an unpivoted LDLᵀ elimination.
fn min_diagonal_pivot(g: &DMatrix<f64>) -> f64 {
    let n = g.nrows();
    let mut a = g.clone();
    let mut min = f64::INFINITY;
    for k in 0..n {
        let p = a[(k, k)];
        min = min.min(p);
        if p <= 0.0 || !p.is_finite() {
            break;
        }
        for i in k + 1..n {
            let l = a[(i, k)] / p;
            for j in k + 1..=i {
                a[(i, j)] -= l * a[(j, k)];
            }
        }
    }
    min
}

/// A model conditioned on data; read-only and shareable across threads.
#[derive(Clone, Debug)]
pub struct Conditioned {
    model: GpModel,
    training: Vec<Query>,
    factor: Option<Factor>,
    alpha: DVector<f64>,
}

impl Conditioned {
    pub fn model(&self) -> &GpModel {
        &self.model
    }

    /// Jitter added for the factorization.
    pub fn jitter(&self) -> f64 {
        self.factor.as_ref().map_or(0.0, |f| f.jitter)
    }

    pub fn mean(&self, q: &Query) -> Result<f64, GpError> {
        let k = self.model.kernel();
        let mut s = 0.0;
        for (t, a) in self.training.iter().zip(self.alpha.iter()) {
            s += a * k.eval(&q.point, q.component, &t.point, t.component)?;
        }
        Ok(s)
    }

    pub fn means(&self, queries: &[Query]) -> Result<Vec<f64>, GpError> {
        queries.par_iter().map(|q| self.mean(q)).collect()
    }

    pub fn posterior(&self, queries: &[Query]) -> Result<Posterior, GpError> {
        let prior = self.model.cross(queries, queries)?;
        let Some(f) = &self.factor else {
            return Ok(Posterior {
                mean: DVector::zeros(queries.len()),
                covariance: prior,
                jitter: 0.0,
            });
        };
        let kxq = self.model.cross(&self.training, queries)?;
        let mean = kxq.transpose() * &self.alpha;
        let v = f.chol.l().solve_lower_triangular(&kxq).expect("nonsingular factor");
        let mut covariance = prior - v.transpose() * v;
        let n = covariance.nrows();
        for i in 0..n {
            for j in 0..i {
                let s = 0.5 * (covariance[(i, j)] + covariance[(j, i)]);
                covariance[(i, j)] = s;
                covariance[(j, i)] = s;
            }
        }
        Ok(Posterior {
            mean,
            covariance,
            jitter: f.jitter,
        })
    }
}

#[derive(Clone, Debug)]
pub struct Posterior {
    pub mean: DVector<f64>,
    pub covariance: DMatrix<f64>,
    /// Diagonal jitter used for the factorization.
    pub jitter: f64,
}

impl Posterior {
    pub fn std_dev(&self) -> Vec<f64> {
        self.covariance.diagonal().iter().map(|v| v.max(0.0).sqrt()).collect()
    }

    /// CSV rows `x1..xd, component, mean, std`.
    pub fn write_csv<W: Write>(&self, queries: &[Query], out: W) -> Result<(), GpError> {
        let d = queries.first().map_or(0, |q| q.point.len());
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
        header.extend(["component", "mean", "std"].map(String::from));
        w.write_record(&header)?;
        let sd = self.std_dev();
        for (i, q) in queries.iter().enumerate() {
            let mut rec: Vec<String> = q.point.iter().map(|x| x.to_string()).collect();
            rec.push(q.component.to_string());
            rec.push(self.mean[i].to_string());
            rec.push(sd[i].to_string());
            w.write_record(&rec)?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Fit {
    pub index: usize,
    pub model: GpModel,
    /// Log marginal likelihood per candidate; `None` where evaluation failed.
    pub scores: Vec<Option<f64>>,
}

/// Grid search maximizing the log marginal likelihood; ties keep the
/// earlier candidate. Candidates whose model cannot be built or factorized
/// are skipped.
pub fn fit_hyperparameters<E>(
    data: &Dataset,
    candidates: &[Hyperparameters],
    build: impl Fn(&Hyperparameters) -> Result<GpModel, E> + Sync,
) -> Result<Fit, GpError> {
    let evaluated: Vec<Option<(GpModel, f64)>> = candidates
        .par_iter()
        .map(|h| {
            let model = build(h).ok()?.with_hyperparameters(h.clone());
            let lml = model.log_marginal_likelihood(data).ok()?;
            lml.is_finite().then_some((model, lml))
        })
        .collect();
    let scores = evaluated.iter().map(|e| e.as_ref().map(|(_, l)| *l)).collect();
    let mut best: Option<(usize, f64)> = None;
    for (i, e) in evaluated.iter().enumerate() {
        if let Some((_, l)) = e {
            if best.is_none_or(|(_, b)| *l > b) {
                best = Some((i, *l));
            }
        }
    }
    let (index, _) = best.ok_or(GpError::NoCandidate)?;
    let model = evaluated.into_iter().nth(index).flatten().unwrap().0;
    Ok(Fit { index, model, scores })
}

/// Cartesian product in lengthscale-major order.
pub fn hyperparameter_grid(lengthscales: &[f64], variances: &[f64], noises: &[f64]) -> Vec<Hyperparameters> {
    let mut out = Vec::new();
    for &lengthscale in lengthscales {
        for &variance in variances {
            for &noise in noises {
                out.push(Hyperparameters {
                    lengthscale,
                    variance,
                    noise,
                });
            }
        }
    }
    out
}

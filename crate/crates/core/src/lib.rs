//! Gaussian process priors whose realizations satisfy systems of linear
//! operator equations.
//!
//! The pipeline: compute the right kernel `B` of an operator matrix `A`
//! with Gröbner bases for modules ([`groebner`], [`parametrization`]),
//! decide whether `B` parametrizes all solutions, push a base covariance
//! through `B` symbolically ([`kernel`]) and condition the resulting
//! multi-output Gaussian process on data ([`gp`]). Ordinary differential
//! operators with rational coefficients are handled by [`ore`].

pub mod algebra;
pub mod gp;
pub mod groebner;
pub mod kernel;
pub mod ore;
pub mod parametrization;
pub mod text;

pub use algebra::{Action, ModuleElement, Monomial, MonomialOrder, OperatorMatrix, Polynomial, Rational, Ring};
pub use groebner::GroebnerBasis;

pub use kernel::{KernelExpr, KernelVars, MatrixKernel};

//! Polynomial stochastic operators on truncated simplices and the
//! nonlinear integral operators they linearize.
//!
//! Indices are 1-based throughout. Storage, piecewise polynomials and
//! kernels are generic over [`Scalar`] (including exact rationals); operator
//! dynamics and solvers are generic over [`Real`].

pub mod error;
pub mod hypermatrix;
pub mod integral;
pub mod io;
mod linalg;
pub mod piecewise;
pub mod pso;
pub mod scalar;
pub mod simplex;
pub mod tolerance;

pub use error::{Error, Result};
pub use hypermatrix::{AuditReport, StochasticHypermatrix};
pub use integral::{IntegralSystem, KernelSeries, MomentFunction};
pub use piecewise::{Dyadic, PiecewisePolynomial};
pub use pso::{MergedPso, Pso, SurjectivityCertificate, Verdict};
pub use scalar::{Real, Scalar};
pub use simplex::{Face, SimplexVector};

pub use num_rational::BigRational;

pub type SimplexVector64 = SimplexVector<f64>;
pub type SimplexVector32 = SimplexVector<f32>;
pub type Hypermatrix64 = StochasticHypermatrix<f64>;
pub type ExactHypermatrix = StochasticHypermatrix<BigRational>;
pub type Pso64 = Pso<f64>;
pub type Pso32 = Pso<f32>;
pub type Piecewise64 = PiecewisePolynomial<f64>;
pub type ExactPiecewise = PiecewisePolynomial<BigRational>;
pub type Kernel64 = KernelSeries<f64>;
pub type ExactKernel = KernelSeries<BigRational>;
pub type IntegralSystem64 = IntegralSystem<f64>;

//! Sparse and block-sparse phase retrieval from magnitude-only Gaussian
//! measurements `y = |A x|`.
//!
//! Recovery is a spectral initialization restricted to a coarse support
//! estimate, followed by alternating minimization between the measurement
//! signs and a warm-started CoSaMP (or block CoSaMP) signal update. The
//! [`harness`] module runs seeded Monte Carlo sweeps over these solvers and
//! writes CSV tables.
//!
//! The numerical core is generic over [`Scalar`] (`f32`, `f64`); the aliases
//! below fix it to `f64`, which is what the harness uses.

#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod cosamp;
pub mod error;
pub mod harness;
pub mod init;
pub mod linalg;
pub mod metrics;
pub mod model;
mod scalar;
pub mod seed;
pub mod solver;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use cosamp::{block_cosamp, cosamp, CosampConfig};
pub use init::{block_copram_init, copram_init, InitEstimate};
pub use linalg::DenseMatrix;
pub use metrics::{dist_op, recovery_verdict, RecoveryVerdict};
pub use model::{BlockStructure, MeasurementEnsemble, Signal};
pub use solver::{block_copram, copram, solve, SolverConfig, SolverMode, SolverReport};

pub type Matrix = DenseMatrix<f64>;
pub type Matrix32 = DenseMatrix<f32>;
pub type Vector = Signal<f64>;
pub type Vector32 = Signal<f32>;
pub type Ensemble = MeasurementEnsemble<f64>;
pub type Report = SolverReport<f64>;
pub type Init = InitEstimate<f64>;

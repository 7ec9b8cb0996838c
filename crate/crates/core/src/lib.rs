//! Classification of real functions by matrix monotonicity and matrix
//! convexity order, membership tests for the positive Pick interpolation
//! classes `C_n`, and sampled verification of Jensen-type operator
//! inequalities.
//!
//! Every negative verdict carries a [`classifiers::Certificate`] that can be
//! re-evaluated from its payload alone, without access to the random stream
//! that produced it.

pub mod classifiers;
pub mod divdiff;
pub mod error;
pub mod funcmodel;
pub mod matcore;
pub mod report;
pub mod rng;
pub mod theorems;

pub use error::{Error, Result};
pub use funcmodel::{FunctionSpec, IntervalSpec};
pub use matcore::HermitianMatrix;

//! Built-in split kernels with known ground truth.

pub mod gibbs;
pub mod special;
pub mod two_state;

use thiserror::Error;

pub use gibbs::{GibbsDrift, GibbsMinorization, GibbsNormalModel, GibbsTruth};
pub use two_state::{TwoStateChain, TwoStateTruth};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("two-state chain needs 0 < beta <= 1/2, got {0}")]
    InvalidBeta(f64),
    #[error("Gibbs model needs t >= 4, got {0}")]
    InvalidDof(u32),
    #[error("small-set radius a = {a} invalid: {reason}")]
    InvalidRadius { a: f64, reason: &'static str },
    #[error("drift condition fails: lambda^2 = {lambda_sq} >= 1")]
    DriftInvalid { lambda_sq: f64 },
}

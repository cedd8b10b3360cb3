//! Regenerative Markov chain Monte Carlo.
//!
//! Simulate split chains whose regeneration times are identifiable, run the
//! sequential regenerative estimator (stop at the first regeneration after
//! `n` steps), combine independent runs with the median trick, and evaluate
//! computable bounds on the resulting mean square error and confidence level.
//!
//! ```
//! use regen_mcmc::models::TwoStateChain;
//! use regen_mcmc::estimator::{plan, run_confident_estimate};
//!
//! let chain = TwoStateChain::new(0.5).unwrap();
//! let truth = chain.truth();
//! let p = plan(truth.sigma_as_sq, truth.n0, 0.1, 0.05).unwrap();
//! let (theta, runs) = run_confident_estimate(&chain, &TwoStateChain::observable(), &p, 7).unwrap();
//! assert_eq!(runs.len(), p.l);
//! assert!((theta - 0.5).abs() < 0.2);
//! ```

pub mod accum;
pub mod bounds;
pub mod estimator;
pub mod models;
pub mod optimize;
pub mod regen;
pub mod seed;

pub use bounds::{BoundError, BoundSource, BoundsReport, DriftParams, DriftSpec};
pub use estimator::{ConfidencePlan, EstimateReport, EstimatorError};
pub use models::ModelError;
pub use regen::{Observable, RegenError, RunOptions, SequentialRun, SplitKernel, Start, Tour};

use thiserror::Error;

/// Any failure raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Regen(#[from] RegenError),
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
}

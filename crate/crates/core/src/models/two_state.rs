//! Two-state chain `P = βπ + (1-β)I` with `π = (1/2, 1/2)` and `f(x) = x`.
//!
//! The whole space is small with `ν = π`, and the reversible uniform bound
//! `(2-β)σ²/β` on the asymptotic variance is attained exactly.

use rand::Rng;

use super::ModelError;
use crate::regen::{Observable, SplitKernel};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoStateChain {
    beta: f64,
}

/// Closed-form quantities for `f(x) = x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoStateTruth {
    /// Stationary variance of `f`, always 1/4.
    pub sigma_sq: f64,
    pub sigma_as_sq: f64,
    pub n0: f64,
    /// Mean tour length `1/β`.
    pub m: f64,
}

impl TwoStateChain {
    pub fn new(beta: f64) -> Result<Self, ModelError> {
        if beta > 0.0 && beta <= 0.5 {
            Ok(Self { beta })
        } else {
            Err(ModelError::InvalidBeta(beta))
        }
    }

    pub fn transition_matrix(&self) -> [[f64; 2]; 2] {
        let off = self.beta / 2.0;
        [[1.0 - off, off], [off, 1.0 - off]]
    }

    pub fn truth(&self) -> TwoStateTruth {
        let b = self.beta;
        TwoStateTruth {
            sigma_sq: 0.25,
            sigma_as_sq: (2.0 - b) / (4.0 * b),
            n0: 2.0 * (1.0 - b) / b,
            m: 1.0 / b,
        }
    }

    /// `f(x) = x`.
    pub fn observable() -> Observable<u8> {
        Observable::new(|x: &u8| f64::from(*x))
    }
}

impl SplitKernel for TwoStateChain {
    type State = u8;

    fn beta(&self) -> f64 {
        self.beta
    }

    fn in_small_set(&self, _x: &u8) -> bool {
        true
    }

    fn mykland_ratio(&self, x: &u8, y: &u8) -> f64 {
        let p = self.transition_matrix()[usize::from(*x)][usize::from(*y)];
        self.beta * 0.5 / p
    }

    fn sample_transition<R: Rng + ?Sized>(&self, x: &u8, rng: &mut R) -> u8 {
        if rng.random::<f64>() < self.beta / 2.0 {
            1 - x
        } else {
            *x
        }
    }

    fn sample_nu<R: Rng + ?Sized>(&self, rng: &mut R) -> u8 {
        u8::from(rng.random::<bool>())
    }
}

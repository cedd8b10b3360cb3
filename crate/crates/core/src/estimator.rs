//! Sequential regenerative estimation and the median trick.
//!
//! A single run stops at the first regeneration past `n` and averages `f`
//! over the simulated trajectory. To reach confidence `1 - α`, `l` (odd)
//! independent runs are combined by their median; `n` is chosen so that each
//! run misses by more than `ε` with probability at most `δ*`, and `l` so that
//! the Chernoff bound on the median is at most `α`.

use std::sync::LazyLock;

use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::bounds::{chernoff_median_bound, BoundError};
use crate::optimize::golden_section_min;
use crate::regen::{run_sequential, Observable, RegenError, RunOptions, SequentialRun, SplitKernel, Start};
use crate::seed::{domain_id, stream_rng};

/// Stored optimal per-run miss probability.
pub const DELTA_STAR: f64 = 0.119_690_080_8;
/// Stored `1 / δ*`.
pub const C1: f64 = 8.354_911_226;
/// Stored `2 / ln(1 / (4δ*(1-δ*)))`.
pub const C2: f64 = 2.314_717_221;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimatorError {
    #[error("cannot estimate from an empty run")]
    EmptyRun,
    #[error("median needs an odd, nonzero number of estimates, got {0}")]
    EvenLength(usize),
    #[error("alpha = {0} must lie in (0, 1/2)")]
    InvalidAlpha(f64),
    #[error("invalid plan input {name} = {value}")]
    InvalidInput { name: &'static str, value: f64 },
    #[error(transparent)]
    Regen(#[from] RegenError),
    #[error(transparent)]
    Bound(#[from] BoundError),
}

/// Constants of the median trick, recomputed from first principles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MedianTrickConstants {
    pub delta_star: f64,
    pub c1: f64,
    pub c2: f64,
    /// `C1 · C2`, the leading cost constant.
    pub c: f64,
}

fn c2_of(delta: f64) -> f64 {
    2.0 / (1.0 / (4.0 * delta * (1.0 - delta))).ln()
}

/// Minimises `C1(δ) C2(δ) = 2 / (δ ln(1/(4δ(1-δ))))` over `δ ∈ (0, 1/2)`.
pub fn optimal_delta() -> f64 {
    let cost = |d: f64| (1.0 / d) * c2_of(d);
    golden_section_min(cost, 1e-6, 0.5 - 1e-6, 1e-12).0
}

static CONSTANTS: LazyLock<MedianTrickConstants> = LazyLock::new(|| {
    let delta_star = optimal_delta();
    let c1 = 1.0 / delta_star;
    let c2 = c2_of(delta_star);
    for (name, computed, stored) in [("delta*", delta_star, DELTA_STAR), ("C1", c1, C1), ("C2", c2, C2)] {
        assert!(
            ((computed - stored) / stored).abs() < 1e-6,
            "{name}: recomputed {computed} disagrees with stored {stored}"
        );
    }
    MedianTrickConstants {
        delta_star: DELTA_STAR,
        c1: C1,
        c2: C2,
        c: C1 * C2,
    }
});

/// The stored constants, verified against a fresh minimisation on first use.
pub fn median_trick_constants() -> MedianTrickConstants {
    *CONSTANTS
}

/// Outcome of one sequential run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateReport {
    pub theta_hat: f64,
    pub n_target: u64,
    pub total_length: u64,
    pub tour_count: usize,
    pub overshoot: u64,
}

/// `θ̂ = Σ_k Ξ_k(f) / T_{R(n)}`.
pub fn estimate<S>(run: &SequentialRun<S>) -> Result<EstimateReport, EstimatorError> {
    if run.tours.is_empty() || run.total_length == 0 {
        return Err(EstimatorError::EmptyRun);
    }
    Ok(EstimateReport {
        theta_hat: run.block_sum() / run.total_length as f64,
        n_target: run.n_target,
        total_length: run.total_length,
        tour_count: run.tour_count,
        overshoot: run.overshoot,
    })
}

/// Middle order statistic of an odd number of estimates.
pub fn median_of_means(estimates: &[f64]) -> Result<f64, EstimatorError> {
    let l = estimates.len();
    if l.is_multiple_of(2) {
        return Err(EstimatorError::EvenLength(l));
    }
    let mut sorted = estimates.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(sorted[l / 2])
}

/// Sample-size plan guaranteeing `P(|θ̂ - θ| > ε) <= α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfidencePlan {
    pub epsilon: f64,
    pub alpha: f64,
    pub sigma_as_sq_bound: f64,
    pub n0_bound: f64,
    /// Length of each run.
    pub n: u64,
    /// Number of runs (odd).
    pub l: usize,
    pub delta_star: f64,
    pub c1: f64,
    pub c2: f64,
    /// Upper bound on the expected number of transitions, `(n + n₀) l`.
    pub expected_total_cost: f64,
}

impl ConfidencePlan {
    /// Chernoff bound on the failure probability of the median at `δ*`.
    pub fn failure_bound(&self) -> f64 {
        chernoff_median_bound(self.delta_star, self.l).expect("plan keeps l odd")
    }
}

/// `n = ⌈C1 σ²/ε² + n₀⌉` and `l` the smallest odd integer `>= C2 ln(1/(2α))`.
pub fn plan(
    sigma_as_sq_bound: f64,
    n0_bound: f64,
    epsilon: f64,
    alpha: f64,
) -> Result<ConfidencePlan, EstimatorError> {
    for (name, value) in [("sigma_as_sq_bound", sigma_as_sq_bound), ("n0_bound", n0_bound)] {
        if !(value >= 0.0 && value.is_finite()) {
            return Err(EstimatorError::InvalidInput { name, value });
        }
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(EstimatorError::InvalidInput {
            name: "epsilon",
            value: epsilon,
        });
    }
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(EstimatorError::InvalidAlpha(alpha));
    }
    let k = median_trick_constants();
    let n = ((k.c1 * sigma_as_sq_bound / (epsilon * epsilon) + n0_bound).ceil() as u64).max(1);
    let l_min = (k.c2 * (1.0 / (2.0 * alpha)).ln()).ceil().max(1.0) as usize;
    let l = if l_min.is_multiple_of(2) { l_min + 1 } else { l_min };
    Ok(ConfidencePlan {
        epsilon,
        alpha,
        sigma_as_sq_bound,
        n0_bound,
        n,
        l,
        delta_star: k.delta_star,
        c1: k.c1,
        c2: k.c2,
        expected_total_cost: (n as f64 + n0_bound) * l as f64,
    })
}

/// Median of `plan.l` independent sequential runs of length `plan.n`.
///
/// Run `j` draws from stream `(master_seed, "confident-estimate", j)`, so the
/// result does not depend on how rayon schedules the runs.
pub fn run_confident_estimate<K: SplitKernel>(
    kernel: &K,
    obs: &Observable<K::State>,
    plan: &ConfidencePlan,
    master_seed: u64,
) -> Result<(f64, Vec<EstimateReport>), EstimatorError> {
    let domain = domain_id("confident-estimate");
    let reports = (0..plan.l as u64)
        .into_par_iter()
        .map(|j| {
            let mut rng = stream_rng(master_seed, domain, j);
            single_estimate(kernel, obs, plan.n, &mut rng)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let thetas: Vec<f64> = reports.iter().map(|r| r.theta_hat).collect();
    Ok((median_of_means(&thetas)?, reports))
}

/// One sequential run from `ν` followed by [`estimate`].
pub fn single_estimate<K: SplitKernel, R: Rng + ?Sized>(
    kernel: &K,
    obs: &Observable<K::State>,
    n: u64,
    rng: &mut R,
) -> Result<EstimateReport, EstimatorError> {
    let run = run_sequential(kernel, obs, n, Start::FromNu, &RunOptions::default(), rng)?;
    estimate(&run)
}

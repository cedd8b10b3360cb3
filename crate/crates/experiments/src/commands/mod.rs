//! One module per subcommand, plus the simulation helpers they share.

pub mod confidence;
pub mod curves;
pub mod table1;
pub mod tau2;
pub mod twostate;

use rayon::prelude::*;
use regen_mcmc::accum::{ratio_estimate, MeanStd};
use regen_mcmc::regen::{Observable, RunOptions, SplitKernel, TourStream};
use regen_mcmc::seed::{domain_id, stream_rng};
use regen_mcmc::RegenError;

/// Long tour runs are split into this many independently seeded streams. The
/// count is fixed so results do not depend on the thread pool.
pub const TOUR_CHUNKS: u64 = 64;

/// Moments of the tour length from a long simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauMoments {
    pub tours: u64,
    pub e_tau: f64,
    pub e_tau_stderr: f64,
    pub e_tau_sq: f64,
    pub e_tau_sq_stderr: f64,
    /// `Eτ²/Eτ − 1` with both moments simulated, and its delta-method error.
    pub n0_ratio: f64,
    pub n0_ratio_stderr: f64,
}

impl TauMoments {
    /// `n₀ = Eτ²/m − 1` with the exact mean tour length `m`, as used for the
    /// bound columns of Table 1.
    pub fn n0_with_exact_m(&self, m: f64) -> (f64, f64) {
        (self.e_tau_sq / m - 1.0, self.e_tau_sq_stderr / m)
    }
}

/// Visits `tours` consecutive tours split over [`TOUR_CHUNKS`] streams and
/// collects `per_tour` for each, in stream order.
pub fn collect_tours<K, T, F>(
    kernel: &K,
    obs: &Observable<K::State>,
    tours: u64,
    master_seed: u64,
    domain: &str,
    per_tour: F,
) -> Result<Vec<T>, RegenError>
where
    K: SplitKernel,
    T: Send,
    F: Fn(&regen_mcmc::Tour<K::State>) -> T + Sync,
{
    let domain = domain_id(domain);
    let chunks = TOUR_CHUNKS.min(tours);
    let chunk_results = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let count = tours / chunks + u64::from(c < tours % chunks);
            let mut rng = stream_rng(master_seed, domain, c);
            TourStream::new(kernel, obs, RunOptions::default(), &mut rng)
                .take(count as usize)
                .map(|tour| tour.map(|t| per_tour(&t)))
                .collect::<Result<Vec<T>, RegenError>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(chunk_results.into_iter().flatten().collect())
}

/// Simulates `tours` tours and summarises `τ` and `τ²`.
pub fn simulate_tau_moments<K: SplitKernel>(
    kernel: &K,
    tours: u64,
    master_seed: u64,
    domain: &str,
) -> Result<TauMoments, RegenError> {
    let obs = Observable::new(|_: &K::State| 0.0);
    let lengths = collect_tours(kernel, &obs, tours, master_seed, domain, |t| t.length as f64)?;
    let squares: Vec<f64> = lengths.iter().map(|l| l * l).collect();
    let tau: MeanStd = lengths.iter().copied().collect();
    let tau_sq: MeanStd = squares.iter().copied().collect();
    let (ratio, ratio_se) = ratio_estimate(&squares, &lengths);
    Ok(TauMoments {
        tours,
        e_tau: tau.mean(),
        e_tau_stderr: tau.stderr(),
        e_tau_sq: tau_sq.mean(),
        e_tau_sq_stderr: tau_sq.stderr(),
        n0_ratio: ratio - 1.0,
        n0_ratio_stderr: ratio_se,
    })
}

/// Stream name for the long `Eτ²` run of the Gibbs model at `(t, a)`; shared
/// by `tau2`, `table1` and `estimate` so they agree on the estimate.
pub fn tau2_domain(t: u32, a: f64) -> String {
    format!("tau2:t={t}:a={a}")
}

/// `sqrt(se1² + se2²)`; NaN when either error is unknown.
pub fn combined_stderr(a: f64, b: f64) -> f64 {
    a.hypot(b)
}

/// `value <= bound` up to `k` combined standard errors; unknown errors (a
/// single replication) cannot demonstrate a violation.
pub fn within_bound(value: f64, bound: f64, stderr: f64, k: f64) -> bool {
    if stderr.is_nan() {
        return true;
    }
    value <= bound + k * stderr
}

//! Split-chain simulation with regeneration detection.
//!
//! A [`SplitKernel`] is a Markov transition `P` together with a one-step
//! minorization `P(x, ·) >= β 1(x ∈ J) ν(·)`. Regenerations are recovered
//! from trajectories of `P` itself: after a move `x -> y` the chain is
//! declared to have regenerated with probability `β ν(dy) / P(x, dy)` when
//! `x ∈ J`. The residual kernel is never sampled.
//!
//! A trajectory is cut at regeneration epochs `T_1 < T_2 < ...` into tours
//! `(X_{T_{k-1}}, ..., X_{T_k - 1})`; tours of a chain started from `ν` are
//! i.i.d.

use rand::Rng;
use thiserror::Error;

use crate::accum::CompensatedSum;

/// Slack allowed on `mykland_ratio <= 1` before it is treated as a model error.
pub const RATIO_TOLERANCE: f64 = 1e-12;

/// Default cap on a single tour length.
pub const DEFAULT_TOUR_CAP: u64 = 1_000_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RegenError {
    #[error("regeneration ratio {ratio} outside [0, 1]: the declared minorization does not hold")]
    RatioOutOfRange { ratio: f64 },
    #[error("tour exceeded {cap} steps without regenerating")]
    TourLengthOverflow { cap: u64 },
    #[error("target length n must be at least 1")]
    InvalidTarget,
}

/// A Markov kernel with a declared small set `J`, constant `β` and
/// regeneration measure `ν`.
///
/// Implementations must be immutable after construction; the same kernel is
/// shared by concurrent replications.
pub trait SplitKernel: Sync {
    type State: Clone + Send + Sync + std::fmt::Debug;

    fn state_dim(&self) -> usize {
        1
    }

    /// Minorization constant β in (0, 1].
    fn beta(&self) -> f64;

    /// `1(x ∈ J)`.
    fn in_small_set(&self, x: &Self::State) -> bool;

    /// `β ν(dy) / P(x, dy)` for `x ∈ J`, zero otherwise.
    fn mykland_ratio(&self, x: &Self::State, y: &Self::State) -> f64;

    /// Draw from `P(x, ·)`.
    fn sample_transition<R: Rng + ?Sized>(&self, x: &Self::State, rng: &mut R) -> Self::State;

    /// Draw from `ν`.
    fn sample_nu<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::State;
}

type ScalarFn<S> = Box<dyn Fn(&S) -> f64 + Send + Sync>;

/// The target function `f` and, optionally, a drift function `V` whose
/// block sums `Σ V` and `Σ V²` are tracked alongside `Σ f`.
pub struct Observable<S> {
    f: ScalarFn<S>,
    drift: Option<ScalarFn<S>>,
}

impl<S> Observable<S> {
    pub fn new(f: impl Fn(&S) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            f: Box::new(f),
            drift: None,
        }
    }

    pub fn with_drift(mut self, v: impl Fn(&S) -> f64 + Send + Sync + 'static) -> Self {
        self.drift = Some(Box::new(v));
        self
    }

    pub fn f(&self, x: &S) -> f64 {
        (self.f)(x)
    }

    pub fn drift(&self, x: &S) -> Option<f64> {
        self.drift.as_ref().map(|v| v(x))
    }

    pub fn has_drift(&self) -> bool {
        self.drift.is_some()
    }
}

impl<S> std::fmt::Debug for Observable<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Observable")
            .field("drift", &self.drift.is_some())
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    /// Keep the visited states in every tour.
    pub retain_states: bool,
    /// Longest admissible tour; longer tours fail with `TourLengthOverflow`.
    pub tour_cap: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            retain_states: false,
            tour_cap: DEFAULT_TOUR_CAP,
        }
    }
}

impl RunOptions {
    pub fn retaining_states() -> Self {
        Self {
            retain_states: true,
            ..Self::default()
        }
    }
}

/// One regeneration block.
#[derive(Debug, Clone, PartialEq)]
pub struct Tour<S> {
    /// Visited states, present only when requested through [`RunOptions`].
    pub states: Option<Vec<S>>,
    pub length: u64,
    /// `Σ f(X_i)` over the tour.
    pub block_sum: f64,
    /// `Σ V(X_i)`, when a drift function is registered.
    pub block_sum_v: Option<f64>,
    /// `Σ V(X_i)²`, when a drift function is registered.
    pub block_sum_v2: Option<f64>,
}

struct TourBuilder<S> {
    states: Option<Vec<S>>,
    length: u64,
    sum_f: CompensatedSum,
    sum_v: Option<(CompensatedSum, CompensatedSum)>,
}

impl<S: Clone> TourBuilder<S> {
    fn new(obs: &Observable<S>, retain: bool) -> Self {
        Self {
            states: retain.then(Vec::new),
            length: 0,
            sum_f: CompensatedSum::new(),
            sum_v: obs
                .has_drift()
                .then(|| (CompensatedSum::new(), CompensatedSum::new())),
        }
    }

    fn push(&mut self, x: &S, obs: &Observable<S>) {
        self.length += 1;
        self.sum_f.add(obs.f(x));
        if let (Some((sv, sv2)), Some(v)) = (self.sum_v.as_mut(), obs.drift(x)) {
            sv.add(v);
            sv2.add(v * v);
        }
        if let Some(states) = self.states.as_mut() {
            states.push(x.clone());
        }
    }

    fn finish(self) -> Tour<S> {
        Tour {
            states: self.states,
            length: self.length,
            block_sum: self.sum_f.value(),
            block_sum_v: self.sum_v.map(|(s, _)| s.value()),
            block_sum_v2: self.sum_v.map(|(_, s)| s.value()),
        }
    }
}

/// One transition of the split chain.
///
/// Returns the next state drawn from `P(state, ·)` and whether the move was a
/// regeneration, i.e. whether the next state is the first of a new tour.
pub fn step_split<K, R>(
    kernel: &K,
    state: &K::State,
    rng: &mut R,
) -> Result<(K::State, bool), RegenError>
where
    K: SplitKernel + ?Sized,
    R: Rng + ?Sized,
{
    let next = kernel.sample_transition(state, rng);
    if !kernel.in_small_set(state) {
        return Ok((next, false));
    }
    let ratio = kernel.mykland_ratio(state, &next);
    // The negated comparison also rejects NaN.
    if !(-RATIO_TOLERANCE..=1.0 + RATIO_TOLERANCE).contains(&ratio) {
        return Err(RegenError::RatioOutOfRange { ratio });
    }
    let regenerated = ratio > 0.0 && rng.random::<f64>() < ratio;
    Ok((next, regenerated))
}

/// Walks one tour starting at `start`; returns the tour and the first state of
/// the following tour.
fn walk_tour<K, R>(
    kernel: &K,
    start: K::State,
    obs: &Observable<K::State>,
    opts: &RunOptions,
    rng: &mut R,
) -> Result<(Tour<K::State>, K::State), RegenError>
where
    K: SplitKernel + ?Sized,
    R: Rng + ?Sized,
{
    let mut tour = TourBuilder::new(obs, opts.retain_states);
    let mut state = start;
    loop {
        if tour.length >= opts.tour_cap {
            return Err(RegenError::TourLengthOverflow { cap: opts.tour_cap });
        }
        tour.push(&state, obs);
        let (next, regenerated) = step_split(kernel, &state, rng)?;
        if regenerated {
            return Ok((tour.finish(), next));
        }
        state = next;
    }
}

/// One tour of the chain started from `ν`.
pub fn sample_block<K, R>(
    kernel: &K,
    obs: &Observable<K::State>,
    opts: &RunOptions,
    rng: &mut R,
) -> Result<Tour<K::State>, RegenError>
where
    K: SplitKernel + ?Sized,
    R: Rng + ?Sized,
{
    let start = kernel.sample_nu(rng);
    walk_tour(kernel, start, obs, opts, rng).map(|(tour, _)| tour)
}

/// The segment `X_0 = x, ..., X_{T-1}` of a chain started at a fixed state,
/// up to its first regeneration `T`.
pub fn sample_tour_from<K, R>(
    kernel: &K,
    start: K::State,
    obs: &Observable<K::State>,
    opts: &RunOptions,
    rng: &mut R,
) -> Result<Tour<K::State>, RegenError>
where
    K: SplitKernel + ?Sized,
    R: Rng + ?Sized,
{
    walk_tour(kernel, start, obs, opts, rng).map(|(tour, _)| tour)
}

/// Consecutive tours of one long trajectory started from `ν`.
///
/// Equivalent in law to repeated [`sample_block`] calls but draws from `ν`
/// only once.
pub struct TourStream<'a, K: SplitKernel + ?Sized, R: Rng + ?Sized> {
    kernel: &'a K,
    obs: &'a Observable<K::State>,
    opts: RunOptions,
    rng: &'a mut R,
    state: Option<K::State>,
}

impl<'a, K: SplitKernel + ?Sized, R: Rng + ?Sized> TourStream<'a, K, R> {
    pub fn new(
        kernel: &'a K,
        obs: &'a Observable<K::State>,
        opts: RunOptions,
        rng: &'a mut R,
    ) -> Self {
        Self {
            kernel,
            obs,
            opts,
            rng,
            state: None,
        }
    }
}

impl<K: SplitKernel + ?Sized, R: Rng + ?Sized> Iterator for TourStream<'_, K, R> {
    type Item = Result<Tour<K::State>, RegenError>;

    fn next(&mut self) -> Option<Self::Item> {
        let start = match self.state.take() {
            Some(s) => s,
            None => self.kernel.sample_nu(self.rng),
        };
        Some(
            walk_tour(self.kernel, start, self.obs, &self.opts, self.rng).map(|(tour, next)| {
                self.state = Some(next);
                tour
            }),
        )
    }
}

/// Initial condition of a sequential run.
#[derive(Debug, Clone, PartialEq)]
pub enum Start<S> {
    /// `X_0 ~ ν`, so time 0 is a regeneration.
    FromNu,
    /// Arbitrary initial state; the trajectory before the first regeneration
    /// is discarded as burn-in.
    FromState(S),
}

/// Tours accumulated until the first regeneration at or after `n`.
#[derive(Debug, Clone)]
pub struct SequentialRun<S> {
    pub tours: Vec<Tour<S>>,
    pub n_target: u64,
    /// `T_{R(n)}`.
    pub total_length: u64,
    /// `R(n)`.
    pub tour_count: usize,
    /// `T_{R(n)} - n`.
    pub overshoot: u64,
    /// Steps discarded before the first regeneration (`FromState` only).
    pub burned_in_steps: u64,
}

impl<S> SequentialRun<S> {
    /// `Σ_k Ξ_k(f)` with compensated accumulation.
    pub fn block_sum(&self) -> f64 {
        self.tours
            .iter()
            .map(|t| t.block_sum)
            .collect::<CompensatedSum>()
            .value()
    }

    /// All retained states in trajectory order, if states were retained.
    pub fn states(&self) -> Option<impl Iterator<Item = &S>> {
        if self.tours.iter().all(|t| t.states.is_some()) {
            Some(self.tours.iter().flat_map(|t| t.states.iter().flatten()))
        } else {
            None
        }
    }

    /// True when the run was started away from `ν`; the constants of the
    /// nonasymptotic bounds refer to the post-burn-in chain only.
    pub fn is_post_burn_in(&self) -> bool {
        self.burned_in_steps > 0
    }
}

/// Simulates the split chain until the first regeneration `T_{R(n)} >= n`.
pub fn run_sequential<K, R>(
    kernel: &K,
    obs: &Observable<K::State>,
    n: u64,
    start: Start<K::State>,
    opts: &RunOptions,
    rng: &mut R,
) -> Result<SequentialRun<K::State>, RegenError>
where
    K: SplitKernel + ?Sized,
    R: Rng + ?Sized,
{
    if n == 0 {
        return Err(RegenError::InvalidTarget);
    }
    let (mut state, burned_in_steps) = match start {
        Start::FromNu => (kernel.sample_nu(rng), 0),
        Start::FromState(x) => {
            let burn_opts = RunOptions {
                retain_states: false,
                ..*opts
            };
            let (burn, next) = walk_tour(kernel, x, obs, &burn_opts, rng)?;
            (next, burn.length)
        }
    };

    let mut tours = Vec::new();
    let mut total_length = 0u64;
    while total_length < n {
        let (tour, next) = walk_tour(kernel, state, obs, opts, rng)?;
        total_length += tour.length;
        tours.push(tour);
        state = next;
    }

    Ok(SequentialRun {
        tour_count: tours.len(),
        tours,
        n_target: n,
        total_length,
        overshoot: total_length - n,
        burned_in_steps,
    })
}

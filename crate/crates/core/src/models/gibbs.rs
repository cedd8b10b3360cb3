//! Gibbs sampler for the normal model with unknown mean and precision under
//! the improper prior `p(μ, κ) ∝ 1/κ`, reduced to its `μ`-chain.
//!
//! Data enter only through `ȳ = 0` and `s² = t`. One sweep maps `μ_prev` to
//! `μ = √(1 + μ_prev²/t) · T` with `T ~ Student-t(t)`; the stationary law is
//! `μ = √(t/(t-1)) · T'` with `T' ~ Student-t(t-1)`. The small set is
//! `J = [-a, a]` and the drift function `V(μ) = √(1 + μ²)`.

use rand::Rng;
use rand_distr::{Distribution, Gamma, Normal};

use super::special::StudentT;
use super::ModelError;
use crate::bounds::{BoundError, DriftParams, DriftSpec};
use crate::regen::{Observable, SplitKernel};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GibbsMinorization {
    /// Crossing point: `p(μ|a) <= p(μ|0)` iff `|μ| <= h(a)`.
    pub h_a: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GibbsDrift {
    pub lambda: f64,
    pub k_const: f64,
    /// Exact `π(V²) = (2t-3)/(t-3)`.
    pub pi_v2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GibbsTruth {
    /// `t/(t-3)`; the chain is a martingale so `σ²_as = E_π μ²`.
    pub sigma_as_sq: f64,
    /// Posterior mean, 0.
    pub theta: f64,
    /// Mean tour length `1/(β π(J))`.
    pub m: f64,
    pub pi_j: f64,
}

#[derive(Debug, Clone)]
pub struct GibbsNormalModel {
    t: u32,
    a: f64,
    minorization: GibbsMinorization,
    drift: GibbsDrift,
    pi_j: f64,
    innovation: StudentT,
    stationary: StudentT,
    two_step: bool,
}

/// `V(μ) = √(1 + μ²)`.
pub fn drift_function(mu: f64) -> f64 {
    mu.hypot(1.0)
}

impl GibbsNormalModel {
    pub fn new(t: u32, a: f64) -> Result<Self, ModelError> {
        if t < 4 {
            return Err(ModelError::InvalidDof(t));
        }
        if !(a.is_finite() && a > 0.0) {
            return Err(ModelError::InvalidRadius {
                a,
                reason: "radius must be positive and finite",
            });
        }
        let tf = f64::from(t);
        let a2 = a * a;

        let lambda_sq = ((2.0 * tf - 3.0) / (1.0 + a2) + 1.0) / (tf - 2.0);
        if lambda_sq >= 1.0 {
            return Err(ModelError::DriftInvalid { lambda_sq });
        }
        let k_sq = 2.0 + (a2 + 2.0) / (tf - 2.0);
        let drift = GibbsDrift {
            lambda: lambda_sq.sqrt(),
            k_const: k_sq.sqrt(),
            pi_v2: (2.0 * tf - 3.0) / (tf - 3.0),
        };

        let growth = (a2 / tf).ln_1p() * (tf / (tf + 1.0));
        let radicand = a2 / growth.exp_m1() - tf;
        // Also rejects NaN.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(radicand >= 0.0) {
            return Err(ModelError::InvalidRadius {
                a,
                reason: "negative radicand in the minorization crossing point",
            });
        }
        let h_a = radicand.sqrt();
        let innovation = StudentT::new(t);
        let c_a = (1.0 + a2 / tf).sqrt();
        let beta =
            1.0 - innovation.central_mass(h_a) + innovation.central_mass(h_a / c_a);

        let stationary = StudentT::new(t - 1);
        let pi_j = stationary.central_mass(a / (tf / (tf - 1.0)).sqrt());

        Ok(Self {
            t,
            a,
            minorization: GibbsMinorization { h_a, beta },
            drift,
            pi_j,
            innovation,
            stationary,
            two_step: false,
        })
    }

    /// Use the literal two-stage Gibbs sweep (κ from its Gamma conditional,
    /// then μ from its normal conditional) instead of the collapsed
    /// Student-t transition. Intended for cross-validation only.
    pub fn with_two_step_sampler(mut self, enabled: bool) -> Self {
        self.two_step = enabled;
        self
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn minorization(&self) -> GibbsMinorization {
        self.minorization
    }

    pub fn drift(&self) -> GibbsDrift {
        self.drift
    }

    pub fn truth(&self) -> GibbsTruth {
        let tf = f64::from(self.t);
        GibbsTruth {
            sigma_as_sq: tf / (tf - 3.0),
            theta: 0.0,
            m: 1.0 / (self.minorization.beta * self.pi_j),
            pi_j: self.pi_j,
        }
    }

    pub fn drift_params(&self) -> Result<DriftParams, BoundError> {
        DriftParams::new(self.drift.lambda, self.drift.k_const, self.minorization.beta)
    }

    /// Drift parameters with exact `π(V²)`, `π(V) <= √π(V²)` (Jensen), and
    /// `‖f̄‖_V = 1` for `f(μ) = μ`.
    pub fn drift_spec(&self) -> Result<DriftSpec, BoundError> {
        let pi_v2 = self.drift.pi_v2;
        DriftSpec::new(self.drift_params()?)
            .with_moments(pi_v2.sqrt(), pi_v2)?
            .with_fbar_norm(1.0)
    }

    /// `f(μ) = μ` with drift function `V(μ) = √(1 + μ²)`.
    pub fn observable() -> Observable<f64> {
        Observable::new(|mu: &f64| *mu).with_drift(|mu: &f64| drift_function(*mu))
    }

    pub fn ln_transition_density(&self, mu_prev: f64, mu: f64) -> f64 {
        let tf = f64::from(self.t);
        let shrink = mu_prev * mu_prev / tf;
        self.innovation.ln_pdf(0.0)
            - 0.5 * (tf + 1.0) * (mu * mu / (tf + mu_prev * mu_prev)).ln_1p()
            - 0.5 * shrink.ln_1p()
    }

    /// `p(μ | μ_prev) = f_t(μ/c)/c` with `c = √(1 + μ_prev²/t)`.
    pub fn transition_density(&self, mu_prev: f64, mu: f64) -> f64 {
        self.ln_transition_density(mu_prev, mu).exp()
    }

    fn ln_p_min(&self, mu: f64) -> f64 {
        if mu.abs() <= self.minorization.h_a {
            self.ln_transition_density(self.a, mu)
        } else {
            self.ln_transition_density(0.0, mu)
        }
    }

    /// Subprobability density `p_min(μ) = min_{|x| <= a} p(μ | x)`.
    pub fn p_min(&self, mu: f64) -> f64 {
        self.ln_p_min(mu).exp()
    }

    /// Density of `ν`, `p_min / β`.
    pub fn nu_density(&self, mu: f64) -> f64 {
        self.p_min(mu) / self.minorization.beta
    }

    /// Draw from the posterior marginal of `μ`.
    pub fn sample_stationary<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let tf = f64::from(self.t);
        (tf / (tf - 1.0)).sqrt() * self.stationary.sample(rng)
    }

    fn two_step_transition<R: Rng + ?Sized>(&self, mu_prev: f64, rng: &mut R) -> f64 {
        let tf = f64::from(self.t);
        // κ ~ Gam(t/2, rate (t/2)(s² + μ²)) with s² = t.
        let rate = 0.5 * tf * (tf + mu_prev * mu_prev);
        let kappa = Gamma::new(0.5 * tf, 1.0 / rate)
            .expect("positive shape and scale")
            .sample(rng);
        Normal::new(0.0, (1.0 / (kappa * tf)).sqrt())
            .expect("finite positive scale")
            .sample(rng)
    }
}

impl SplitKernel for GibbsNormalModel {
    type State = f64;

    fn beta(&self) -> f64 {
        self.minorization.beta
    }

    fn in_small_set(&self, x: &f64) -> bool {
        x.abs() <= self.a
    }

    fn mykland_ratio(&self, x: &f64, y: &f64) -> f64 {
        if !self.in_small_set(x) {
            return 0.0;
        }
        (self.ln_p_min(*y) - self.ln_transition_density(*x, *y)).exp()
    }

    fn sample_transition<R: Rng + ?Sized>(&self, x: &f64, rng: &mut R) -> f64 {
        if self.two_step {
            return self.two_step_transition(*x, rng);
        }
        let scale = (1.0 + x * x / f64::from(self.t)).sqrt();
        scale * self.innovation.sample(rng)
    }

    /// `ν` is a mixture of `p(·|a)` restricted to `|μ| <= h` and `p(·|0)`
    /// restricted to `|μ| > h`; each piece is drawn by rejection from its
    /// untruncated Student-t law.
    fn sample_nu<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let h = self.minorization.h_a;
        let c_a = (1.0 + self.a * self.a / f64::from(self.t)).sqrt();
        let inner = self.innovation.central_mass(h / c_a);
        if rng.random::<f64>() * self.minorization.beta < inner {
            loop {
                let mu = c_a * self.innovation.sample(rng);
                if mu.abs() <= h {
                    return mu;
                }
            }
        } else {
            loop {
                let mu = self.innovation.sample(rng);
                if mu.abs() > h {
                    return mu;
                }
            }
        }
    }
}

//! Closed-form bounds on the error of the sequential regenerative estimator.
//!
//! Everything here is a pure function of a handful of scalars: the
//! asymptotic variance `σ²_as`, the overshoot constant `n₀ = Eτ²/Eτ - 1`, the
//! minorization constant `β`, and, for geometrically ergodic chains, the
//! drift parameters `(λ, K)` of `PV² <= λ²V²` off the small set and
//! `PV² <= K²` on it.
//!
//! Invalid parameters produce a [`BoundError`] instead of an infinite or NaN
//! bound.

use thiserror::Error;

use crate::estimator::median_trick_constants;
use crate::models::special::standard_normal_quantile;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundError {
    #[error("invalid {name} = {value}: expected {expected}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    #[error("impossible moments: E[tau^2] = {e_tau_sq} < E[tau]^2 = {}", e_tau * e_tau)]
    MomentOrderViolation { e_tau: f64, e_tau_sq: f64 },
    #[error("drift bounds need both pi(V) and pi(V^2)")]
    MissingMoments,
    #[error("no V-norm of the centred target function available")]
    MissingNorm,
    #[error("median trick needs an odd number of replications, got {0}")]
    EvenLength(usize),
    #[error("alpha = {0} must lie in (0, 1/2)")]
    InvalidAlpha(f64),
}

fn check(name: &'static str, value: f64, ok: bool, expected: &'static str) -> Result<(), BoundError> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(BoundError::InvalidParameter {
            name,
            value,
            expected,
        })
    }
}

fn check_beta(beta: f64) -> Result<(), BoundError> {
    check("beta", beta, beta > 0.0 && beta <= 1.0, "0 < beta <= 1")
}

fn check_nonneg(name: &'static str, value: f64) -> Result<(), BoundError> {
    check(name, value, value >= 0.0, "a nonnegative number")
}

/// Which formula produced a [`BoundsReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundSource {
    UniformGeneral,
    UniformReversible,
    DriftTheorem,
    DriftCorollary,
    Exact,
}

impl std::fmt::Display for BoundSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BoundSource::UniformGeneral => "uniform",
            BoundSource::UniformReversible => "uniform-reversible",
            BoundSource::DriftTheorem => "drift-theorem",
            BoundSource::DriftCorollary => "drift-corollary",
            BoundSource::Exact => "exact",
        })
    }
}

/// Bounds (or exact values) of `σ²_as` and `n₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsReport {
    pub sigma_as_sq: f64,
    pub n0: f64,
    pub mse: Option<f64>,
    pub source: BoundSource,
}

impl BoundsReport {
    pub fn new(sigma_as_sq: f64, n0: f64, source: BoundSource) -> Result<Self, BoundError> {
        check_nonneg("sigma_as_sq", sigma_as_sq)?;
        check_nonneg("n0", n0)?;
        Ok(Self {
            sigma_as_sq,
            n0,
            mse: None,
            source,
        })
    }

    /// Attaches the MSE bound for simulation length `n`.
    pub fn with_mse(mut self, n: u64) -> Result<Self, BoundError> {
        self.mse = Some(mse_bound(self.sigma_as_sq, self.n0, n)?);
        Ok(self)
    }
}

/// `σ²_as / n · (1 + n₀ / n)`.
pub fn mse_bound(sigma_as_sq: f64, n0: f64, n: u64) -> Result<f64, BoundError> {
    check_nonneg("sigma_as_sq", sigma_as_sq)?;
    check_nonneg("n0", n0)?;
    check("n", n as f64, n >= 1, "n >= 1")?;
    let n = n as f64;
    Ok(sigma_as_sq / n * (1.0 + n0 / n))
}

/// Lorden's bound on the mean overshoot, `n₀ = Eτ² / Eτ - 1`.
pub fn overshoot_bound(e_tau: f64, e_tau_sq: f64) -> Result<f64, BoundError> {
    check("e_tau", e_tau, e_tau >= 1.0, "E[tau] >= 1")?;
    check_nonneg("e_tau_sq", e_tau_sq)?;
    if e_tau_sq < e_tau * e_tau {
        return Err(BoundError::MomentOrderViolation { e_tau, e_tau_sq });
    }
    Ok(e_tau_sq / e_tau - 1.0)
}

/// Both forms of the asymptotic-variance bound for a uniformly ergodic chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformAsVarBounds {
    /// `σ² (1 + 2 (1 + √(1-β)) / β)`.
    pub exact_form: f64,
    /// `4 σ² / β`.
    pub simple_form: f64,
}

/// Asymptotic-variance bound when the whole space is small (`J = X`);
/// `sigma_sq` is the stationary variance of `f`.
pub fn asvar_uniform(sigma_sq: f64, beta: f64) -> Result<UniformAsVarBounds, BoundError> {
    check_nonneg("sigma_sq", sigma_sq)?;
    check_beta(beta)?;
    Ok(UniformAsVarBounds {
        exact_form: sigma_sq * (1.0 + 2.0 * (1.0 + (1.0 - beta).sqrt()) / beta),
        simple_form: 4.0 * sigma_sq / beta,
    })
}

/// The sharper bound `(2 - β) σ² / β` for reversible uniformly ergodic chains.
pub fn asvar_reversible_uniform(sigma_sq: f64, beta: f64) -> Result<f64, BoundError> {
    check_nonneg("sigma_sq", sigma_sq)?;
    check_beta(beta)?;
    Ok((2.0 - beta) * sigma_sq / beta)
}

/// Validated drift/minorization triple `(λ, K, β)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftParams {
    lambda: f64,
    k_const: f64,
    beta: f64,
}

impl DriftParams {
    pub fn new(lambda: f64, k_const: f64, beta: f64) -> Result<Self, BoundError> {
        check("lambda", lambda, (0.0..1.0).contains(&lambda), "0 <= lambda < 1")?;
        check("k_const", k_const, k_const >= 1.0, "K >= 1")?;
        check_beta(beta)?;
        Ok(Self {
            lambda,
            k_const,
            beta,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn k_const(&self) -> f64 {
        self.k_const
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// Drift parameters plus whatever extra knowledge about `π` and `f` is available.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftSpec {
    pub params: DriftParams,
    /// `π(V)`, or an upper bound on it.
    pub pi_v: Option<f64>,
    /// `π(V²)`, or an upper bound on it.
    pub pi_v2: Option<f64>,
    /// `‖f - π f‖_V`.
    pub fbar_v_norm: Option<f64>,
    /// `‖f‖_V`.
    pub f_v_norm: Option<f64>,
}

impl DriftSpec {
    pub fn new(params: DriftParams) -> Self {
        Self {
            params,
            pi_v: None,
            pi_v2: None,
            fbar_v_norm: None,
            f_v_norm: None,
        }
    }

    pub fn with_moments(mut self, pi_v: f64, pi_v2: f64) -> Result<Self, BoundError> {
        check("pi_v", pi_v, pi_v >= 1.0, "pi(V) >= 1")?;
        check("pi_v2", pi_v2, pi_v2 >= 1.0, "pi(V^2) >= 1")?;
        // Jensen: π(V)² <= π(V²).
        if pi_v * pi_v > pi_v2 * (1.0 + 1e-12) {
            return Err(BoundError::InvalidParameter {
                name: "pi_v",
                value: pi_v,
                expected: "pi(V) <= sqrt(pi(V^2))",
            });
        }
        self.pi_v = Some(pi_v);
        self.pi_v2 = Some(pi_v2);
        Ok(self)
    }

    /// Fills `π(V)` and `π(V²)` with the upper bounds implied by the drift
    /// condition. The two bounds need not satisfy Jensen jointly, so no
    /// consistency check is made.
    pub fn with_moment_bounds(mut self) -> Result<Self, BoundError> {
        let (pi_v, pi_v2) = pi_moment_bounds(self.params.lambda, self.params.k_const)?;
        self.pi_v = Some(pi_v);
        self.pi_v2 = Some(pi_v2);
        Ok(self)
    }

    pub fn with_fbar_norm(mut self, norm: f64) -> Result<Self, BoundError> {
        check_nonneg("fbar_v_norm", norm)?;
        self.fbar_v_norm = Some(norm);
        Ok(self)
    }

    pub fn with_f_norm(mut self, norm: f64) -> Result<Self, BoundError> {
        check_nonneg("f_v_norm", norm)?;
        self.f_v_norm = Some(norm);
        Ok(self)
    }

    /// `‖f̄‖_V` if given, otherwise the bound derived from `‖f‖_V`.
    pub fn resolved_fbar_norm(&self) -> Result<f64, BoundError> {
        match (self.fbar_v_norm, self.f_v_norm) {
            (Some(norm), _) => Ok(norm),
            (None, Some(f_norm)) => {
                fbar_norm_from_f(f_norm, self.params.lambda, self.params.k_const)
            }
            (None, None) => Err(BoundError::MissingNorm),
        }
    }
}

/// Bound on `E_x Σ_{n=1}^{T-1} V(X_n)`, the drift function summed over the
/// remainder of the first tour from `x`.
///
/// With `in_small_set` the first term is dropped, which is the sharper form
/// valid for starting points in `J`.
pub fn bax_block_bound(
    v_x: f64,
    params: &DriftParams,
    in_small_set: bool,
) -> Result<f64, BoundError> {
    check("v_x", v_x, v_x >= 1.0, "V(x) >= 1")?;
    let DriftParams {
        lambda,
        k_const,
        beta,
    } = *params;
    let start = if in_small_set {
        0.0
    } else {
        lambda * (v_x - 1.0) / (1.0 - lambda)
    };
    Ok(start + (k_const - lambda) / (beta * (1.0 - lambda)) - 1.0)
}

/// Bounds on `n₀` and `σ²_as` using known (or bounded) `π(V)` and `π(V²)`.
///
/// The variance bound assumes `|f̄| <= ‖f̄‖_V · V` with `‖f̄‖_V = 1` unless a
/// norm is supplied, in which case it is scaled by `‖f̄‖²_V`.
pub fn drift_theorem_bounds(spec: &DriftSpec) -> Result<BoundsReport, BoundError> {
    let (pi_v, pi_v2) = match (spec.pi_v, spec.pi_v2) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(BoundError::MissingMoments),
    };
    let DriftParams {
        lambda: l,
        k_const: k,
        beta: b,
    } = spec.params;
    let n0 = 2.0 * ((l * pi_v - l) / (1.0 - l) + (k - l) / (b * (1.0 - l)) - 1.0);
    let unit_asvar =
        (1.0 + l) / (1.0 - l) * pi_v2 + 2.0 * ((k - l - b) / (b * (1.0 - l))) * pi_v;
    let scale = spec.fbar_v_norm.unwrap_or(1.0).powi(2);
    BoundsReport::new(unit_asvar * scale, n0, BoundSource::DriftTheorem)
}

/// Bounds on `n₀` and `σ²_as` from `(λ, K, β)` and `‖f̄‖_V` alone.
pub fn drift_corollary_bounds(spec: &DriftSpec) -> Result<BoundsReport, BoundError> {
    let fbar = spec.resolved_fbar_norm()?;
    let DriftParams {
        lambda: l,
        k_const: k,
        beta: b,
    } = spec.params;
    let n0 = 2.0 / ((1.0 - l) * b)
        * (k * (1.0 - l * (1.0 - b)) / (1.0 - l) - b * (1.0 + l * l / (1.0 - l)) - l);
    let numerator =
        k * k * (2.0 + b) - 2.0 * k * (2.0 * l + b) + 2.0 * l * l + 2.0 * l * b - l * l * b;
    let asvar = fbar * fbar * numerator / ((1.0 - l).powi(2) * b);
    BoundsReport::new(asvar, n0, BoundSource::DriftCorollary)
}

/// Upper bounds `(π(V), π(V²))` implied by the drift condition, taking `π(J) = 1`.
pub fn pi_moment_bounds(lambda: f64, k_const: f64) -> Result<(f64, f64), BoundError> {
    check("lambda", lambda, (0.0..1.0).contains(&lambda), "0 <= lambda < 1")?;
    check("k_const", k_const, k_const >= 1.0, "K >= 1")?;
    Ok((
        (k_const - lambda) / (1.0 - lambda),
        (k_const * k_const - lambda * lambda) / (1.0 - lambda * lambda),
    ))
}

/// `‖f̄‖_V <= ‖f‖_V + (K - λ) / (1 - λ)`.
pub fn fbar_norm_from_f(f_v_norm: f64, lambda: f64, k_const: f64) -> Result<f64, BoundError> {
    check_nonneg("f_v_norm", f_v_norm)?;
    let (pi_v_bound, _) = pi_moment_bounds(lambda, k_const)?;
    Ok(f_v_norm + pi_v_bound)
}

/// Leading-order simulation costs for `P(|θ̂ - θ| > ε) <= α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostComparison {
    /// Regenerative median estimator with the general uniform bound `4σ²/β`.
    pub regen_general: f64,
    /// Same with the reversible bound `(2-β)σ²/β`.
    pub regen_reversible: f64,
    /// Exponential inequality for uniformly ergodic chains, `2σ²/(β²ε²) ln(1/2α)`.
    pub klm_exponential: f64,
    /// CLT approximation `σ²_as/ε² [Φ⁻¹(1-α/2)]²` (asymptotic only).
    pub clt_asymptotic: f64,
    /// `regen_general / klm_exponential = 2Cβ`.
    pub ratio_general: f64,
    /// `regen_reversible / klm_exponential = Cβ(2-β)/2`.
    pub ratio_reversible: f64,
}

/// Compares the sample costs of the regenerative scheme, the exponential
/// inequality and the CLT heuristic. `sigma_as_sq` feeds the CLT cost only.
pub fn cost_comparison(
    sigma_sq: f64,
    sigma_as_sq: f64,
    beta: f64,
    epsilon: f64,
    alpha: f64,
) -> Result<CostComparison, BoundError> {
    check_nonneg("sigma_sq", sigma_sq)?;
    check_nonneg("sigma_as_sq", sigma_as_sq)?;
    check_beta(beta)?;
    check("epsilon", epsilon, epsilon > 0.0, "epsilon > 0")?;
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(BoundError::InvalidAlpha(alpha));
    }
    let c = median_trick_constants().c;
    let log_term = (1.0 / (2.0 * alpha)).ln();
    let eps2 = epsilon * epsilon;
    let regen_general = c * 4.0 * sigma_sq / (beta * eps2) * log_term;
    let regen_reversible = c * (2.0 - beta) * sigma_sq / (beta * eps2) * log_term;
    let klm_exponential = 2.0 * sigma_sq / (beta * beta * eps2) * log_term;
    let z = standard_normal_quantile(1.0 - alpha / 2.0);
    Ok(CostComparison {
        regen_general,
        regen_reversible,
        klm_exponential,
        clt_asymptotic: sigma_as_sq / eps2 * z * z,
        ratio_general: 2.0 * c * beta,
        ratio_reversible: c * beta * (2.0 - beta) / 2.0,
    })
}

/// Chebyshev bound `σ²_as/(nε²) (1 + n₀/n)` on `P(|θ̂ - θ| > ε)`.
pub fn chebyshev_bound(sigma_as_sq: f64, n0: f64, n: u64, epsilon: f64) -> Result<f64, BoundError> {
    check("epsilon", epsilon, epsilon > 0.0, "epsilon > 0")?;
    Ok(mse_bound(sigma_as_sq, n0, n)? / (epsilon * epsilon))
}

/// Chernoff bound `½ [4δ(1-δ)]^{l/2}` for the median of `l` independent
/// estimates that each miss with probability at most `δ`.
pub fn chernoff_median_bound(delta: f64, l: usize) -> Result<f64, BoundError> {
    check("delta", delta, delta > 0.0 && delta < 0.5, "0 < delta < 1/2")?;
    if l.is_multiple_of(2) {
        return Err(BoundError::EvenLength(l));
    }
    Ok(0.5 * (4.0 * delta * (1.0 - delta)).powf(l as f64 / 2.0))
}

//! Student-t and normal special functions.

use rand::Rng;
use rand_distr::{Distribution, StudentT as StudentTSampler};
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::gamma::ln_gamma;

const CF_EPS: f64 = 1e-14;
const CF_TINY: f64 = 1e-300;
const CF_MAX_ITER: usize = 100_000;

fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Continued fraction for the incomplete beta (modified Lentz).
fn beta_continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let clamp = |v: f64| if v.abs() < CF_TINY { CF_TINY } else { v };

    let mut c = 1.0;
    let mut d = 1.0 / clamp(1.0 - qab * x / qap);
    let mut h = d;
    for m in 1..=CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 / clamp(1.0 + aa * d);
        c = clamp(1.0 + aa / c);
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 / clamp(1.0 + aa * d);
        c = clamp(1.0 + aa / c);
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < CF_EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta function I_x(a, b) for a, b > 0 and x in [0, 1].
pub fn regularized_incomplete_beta(a: f64, b: f64, x: f64) -> f64 {
    assert!(a > 0.0 && b > 0.0, "beta parameters must be positive");
    assert!((0.0..=1.0).contains(&x), "x = {x} outside [0, 1]");
    if x == 0.0 {
        return 0.0;
    }
    if x == 1.0 {
        return 1.0;
    }
    let ln_front = a * x.ln() + b * (-x).ln_1p() - ln_beta(a, b);
    if x < (a + 1.0) / (a + b + 2.0) {
        ln_front.exp() * beta_continued_fraction(a, b, x) / a
    } else {
        1.0 - ln_front.exp() * beta_continued_fraction(b, a, 1.0 - x) / b
    }
}

/// Student-t law with a fixed number of degrees of freedom.
///
/// Caches the density normalisation and the sampler so the Gibbs kernel can
/// evaluate it in its inner loop.
#[derive(Debug, Clone)]
pub struct StudentT {
    dof: f64,
    ln_norm: f64,
    sampler: StudentTSampler<f64>,
}

impl StudentT {
    pub fn new(dof: u32) -> Self {
        assert!(dof >= 1, "Student-t needs at least one degree of freedom");
        let nu = f64::from(dof);
        let ln_norm = ln_gamma((nu + 1.0) / 2.0)
            - ln_gamma(nu / 2.0)
            - 0.5 * (nu * std::f64::consts::PI).ln();
        Self {
            dof: nu,
            ln_norm,
            sampler: StudentTSampler::new(nu).expect("positive dof"),
        }
    }

    pub fn dof(&self) -> f64 {
        self.dof
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        self.ln_norm - 0.5 * (self.dof + 1.0) * (x * x / self.dof).ln_1p()
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.ln_pdf(x).exp()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        t_cdf(x, self.dof)
    }

    /// P(|T| <= r).
    pub fn central_mass(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let nu = self.dof;
        let r2 = r * r;
        if r2 < nu {
            regularized_incomplete_beta(0.5, nu / 2.0, r2 / (nu + r2))
        } else {
            1.0 - regularized_incomplete_beta(nu / 2.0, 0.5, nu / (nu + r2))
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sampler.sample(rng)
    }
}

fn t_cdf(x: f64, nu: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x == 0.0 {
        return 0.5;
    }
    let x2 = x * x;
    let half = if x2 < nu {
        0.5 - 0.5 * regularized_incomplete_beta(0.5, nu / 2.0, x2 / (nu + x2))
    } else {
        0.5 * regularized_incomplete_beta(nu / 2.0, 0.5, nu / (nu + x2))
    };
    // `half` is the upper tail P(T > |x|).
    if x > 0.0 {
        1.0 - half
    } else {
        half
    }
}

/// CDF of the Student-t distribution with `dof` degrees of freedom.
pub fn student_t_cdf(x: f64, dof: u32) -> f64 {
    assert!(dof >= 1, "Student-t needs at least one degree of freedom");
    t_cdf(x, f64::from(dof))
}

/// One exact Student-t draw (normal over scaled chi).
pub fn student_t_sample<R: Rng + ?Sized>(dof: u32, rng: &mut R) -> f64 {
    StudentT::new(dof).sample(rng)
}

/// Quantile of the standard normal distribution.
pub fn standard_normal_quantile(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "probability {p} outside (0, 1)");
    Normal::standard().inverse_cdf(p)
}

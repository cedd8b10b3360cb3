//! Sample-size planning and the median-of-runs confidence procedure.

use rayon::prelude::*;
use regen_mcmc::bounds::{
    asvar_reversible_uniform, asvar_uniform, cost_comparison, drift_corollary_bounds,
    drift_theorem_bounds,
};
use regen_mcmc::estimator::{plan, run_confident_estimate, ConfidencePlan, EstimateReport};
use regen_mcmc::models::{GibbsNormalModel, TwoStateChain};
use regen_mcmc::regen::{Observable, SplitKernel};
use regen_mcmc::seed::{domain_id, stream_seed};

use super::{simulate_tau_moments, tau2_domain};
use crate::config::{ConfigError, ExperimentConfig, ModelKind, SourceKind};
use crate::error::ExperimentError;
use crate::output::Output;
use crate::table::{Cell, Table};

/// Inputs of a confidence plan and where they came from.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanInputs {
    pub sigma_as_sq: f64,
    pub n0: f64,
    pub source: SourceKind,
    /// How the inputs were obtained, for the report.
    pub note: String,
    /// True value of `θ`, known for both built-in models.
    pub theta: f64,
}

pub fn plan_inputs(cfg: &ExperimentConfig) -> Result<PlanInputs, ExperimentError> {
    let unsupported = |what: &str| {
        ExperimentError::Config(ConfigError::Unsupported(format!(
            "source {} is not available for model {}: {what}",
            cfg.source, cfg.model
        )))
    };
    match cfg.model {
        ModelKind::TwoState => {
            let chain = TwoStateChain::new(cfg.beta)?;
            let truth = chain.truth();
            // With J the whole space every step regenerates with probability β,
            // so n₀ = 2(1−β)/β holds for every uniform source.
            let (sigma_as_sq, note) = match cfg.source {
                SourceKind::Exact => (truth.sigma_as_sq, "closed form (2-beta)sigma^2/beta".to_string()),
                SourceKind::Uniform => (
                    asvar_uniform(truth.sigma_sq, cfg.beta)?.exact_form,
                    "uniform-ergodicity bound".to_string(),
                ),
                SourceKind::UniformReversible => (
                    asvar_reversible_uniform(truth.sigma_sq, cfg.beta)?,
                    "reversible uniform bound".to_string(),
                ),
                SourceKind::DriftTheorem | SourceKind::DriftCorollary => {
                    return Err(unsupported("the chain has no drift function"))
                }
            };
            Ok(PlanInputs {
                sigma_as_sq,
                n0: truth.n0,
                source: cfg.source,
                note,
                theta: 0.5,
            })
        }
        ModelKind::Gibbs => {
            let model = GibbsNormalModel::new(cfg.t, cfg.a)?;
            let truth = model.truth();
            let (sigma_as_sq, n0, note) = match cfg.source {
                SourceKind::Exact => {
                    let tau = simulate_tau_moments(
                        &model,
                        cfg.tau2_run_tours,
                        cfg.master_seed,
                        &tau2_domain(cfg.t, cfg.a),
                    )?;
                    let (n0, se) = tau.n0_with_exact_m(truth.m);
                    (
                        truth.sigma_as_sq,
                        n0,
                        format!(
                            "sigma_as^2 = t/(t-3) exact; n0 from simulated E tau^2 over {} tours (stderr {:.2e})",
                            cfg.tau2_run_tours, se
                        ),
                    )
                }
                SourceKind::DriftTheorem => {
                    let b = drift_theorem_bounds(&model.drift_spec()?)?;
                    (b.sigma_as_sq, b.n0, "drift bounds with exact pi(V^2)".to_string())
                }
                SourceKind::DriftCorollary => {
                    let b = drift_corollary_bounds(&model.drift_spec()?)?;
                    (b.sigma_as_sq, b.n0, "drift bounds from (lambda, K, beta)".to_string())
                }
                SourceKind::Uniform | SourceKind::UniformReversible => {
                    return Err(unsupported("the sampler is not uniformly ergodic"))
                }
            };
            Ok(PlanInputs {
                sigma_as_sq,
                n0,
                source: cfg.source,
                note,
                theta: truth.theta,
            })
        }
    }
}

pub const PLAN_COLUMNS: [&str; 14] = [
    "model",
    "source",
    "epsilon",
    "alpha",
    "sigma_as_sq_bound",
    "n0_bound",
    "n",
    "l",
    "delta_star",
    "c1",
    "c2",
    "expected_total_cost",
    "failure_bound",
    "note",
];

fn plan_table(cfg: &ExperimentConfig, inputs: &PlanInputs, p: &ConfidencePlan) -> Table {
    let mut t = Table::new(PLAN_COLUMNS);
    t.push(vec![
        Cell::from(cfg.model.to_string()),
        Cell::from(inputs.source.to_string()),
        Cell::from(p.epsilon),
        Cell::from(p.alpha),
        Cell::from(p.sigma_as_sq_bound),
        Cell::from(p.n0_bound),
        Cell::from(p.n),
        Cell::from(p.l),
        Cell::from(p.delta_star),
        Cell::from(p.c1),
        Cell::from(p.c2),
        Cell::from(p.expected_total_cost),
        Cell::from(p.failure_bound()),
        Cell::from(inputs.note.clone()),
    ]);
    t
}

fn plan_report(cfg: &ExperimentConfig, inputs: &PlanInputs, p: &ConfidencePlan) -> String {
    format!(
        "Plan ({} model, source {}): sigma_as^2 <= {:.6}, n0 <= {:.6}\n  {}\n  \
         n = {} steps per run, l = {} runs, expected cost <= {:.1} steps\n  \
         guarantee: P(|theta_hat - theta| > {}) <= {} (Chernoff bound {:.4})\n",
        cfg.model,
        inputs.source,
        p.sigma_as_sq_bound,
        p.n0_bound,
        inputs.note,
        p.n,
        p.l,
        p.expected_total_cost,
        p.epsilon,
        p.alpha,
        p.failure_bound()
    )
}

pub fn run_plan(cfg: &ExperimentConfig) -> Result<Output, ExperimentError> {
    let inputs = plan_inputs(cfg)?;
    let p = plan(inputs.sigma_as_sq, inputs.n0, cfg.epsilon, cfg.alpha)?;
    let mut out = Output {
        report: plan_report(cfg, &inputs, &p),
        ..Output::default()
    };
    out.tables.push(("plan".to_string(), plan_table(cfg, &inputs, &p)));
    if cfg.model == ModelKind::TwoState {
        let truth = TwoStateChain::new(cfg.beta)?.truth();
        let c = cost_comparison(truth.sigma_sq, truth.sigma_as_sq, cfg.beta, cfg.epsilon, cfg.alpha)?;
        let mut t = Table::new([
            "regen_general",
            "regen_reversible",
            "klm_exponential",
            "clt_asymptotic",
            "ratio_general",
            "ratio_reversible",
        ]);
        t.push(
            [
                c.regen_general,
                c.regen_reversible,
                c.klm_exponential,
                c.clt_asymptotic,
                c.ratio_general,
                c.ratio_reversible,
            ]
            .map(Cell::from)
            .to_vec(),
        );
        out.tables.push(("cost_comparison".to_string(), t));
    }
    Ok(out)
}

/// One application of the confidence procedure.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfidentRun {
    pub theta_hat: f64,
    pub total_steps: u64,
    pub runs: Vec<EstimateReport>,
}

fn confident_run<K: SplitKernel>(
    kernel: &K,
    obs: &Observable<K::State>,
    p: &ConfidencePlan,
    seed: u64,
) -> Result<ConfidentRun, ExperimentError> {
    let (theta_hat, runs) = run_confident_estimate(kernel, obs, p, seed)?;
    Ok(ConfidentRun {
        theta_hat,
        total_steps: runs.iter().map(|r| r.total_length).sum(),
        runs,
    })
}

/// Runs the procedure once with the master seed, or `meta_runs` times with
/// derived seeds.
fn repeat<K: SplitKernel>(
    kernel: &K,
    obs: &Observable<K::State>,
    p: &ConfidencePlan,
    cfg: &ExperimentConfig,
) -> Result<Vec<ConfidentRun>, ExperimentError> {
    if cfg.meta_runs == 0 {
        return Ok(vec![confident_run(kernel, obs, p, cfg.master_seed)?]);
    }
    let domain = domain_id("estimate-meta");
    (0..cfg.meta_runs)
        .into_par_iter()
        .map(|i| confident_run(kernel, obs, p, stream_seed(cfg.master_seed, domain, i)))
        .collect()
}

pub const ESTIMATE_COLUMNS: [&str; 6] = ["run", "theta_hat", "abs_error", "total_steps", "tours", "within_epsilon"];

pub const SUMMARY_COLUMNS: [&str; 12] = [
    "model",
    "source",
    "epsilon",
    "alpha",
    "n",
    "l",
    "runs",
    "failures",
    "failure_rate",
    "binomial_stderr",
    "mean_total_steps",
    "status",
];

pub fn run_estimate(cfg: &ExperimentConfig) -> Result<Output, ExperimentError> {
    let inputs = plan_inputs(cfg)?;
    let p = plan(inputs.sigma_as_sq, inputs.n0, cfg.epsilon, cfg.alpha)?;
    let results = match cfg.model {
        ModelKind::TwoState => {
            let chain = TwoStateChain::new(cfg.beta)?;
            repeat(&chain, &TwoStateChain::observable(), &p, cfg)?
        }
        ModelKind::Gibbs => {
            let model = GibbsNormalModel::new(cfg.t, cfg.a)?;
            repeat(&model, &GibbsNormalModel::observable(), &p, cfg)?
        }
    };

    let mut out = Output {
        report: plan_report(cfg, &inputs, &p),
        ..Output::default()
    };
    let mut rows = Table::new(ESTIMATE_COLUMNS);
    let mut failures = 0u64;
    let mut steps = 0u64;
    for (i, r) in results.iter().enumerate() {
        let err = (r.theta_hat - inputs.theta).abs();
        let ok = err <= cfg.epsilon;
        failures += u64::from(!ok);
        steps += r.total_steps;
        rows.push(vec![
            Cell::from(i),
            Cell::from(r.theta_hat),
            Cell::from(err),
            Cell::from(r.total_steps),
            Cell::from(r.runs.iter().map(|e| e.tour_count).sum::<usize>()),
            Cell::from(ok),
        ]);
    }
    let runs = results.len() as u64;
    let rate = failures as f64 / runs as f64;
    let se = (cfg.alpha * (1.0 - cfg.alpha) / runs as f64).sqrt();
    // A single run cannot test the failure rate.
    let valid = runs < 2 || rate <= cfg.alpha + 2.0 * se;
    if let [only] = results.as_slice() {
        out.report.push_str(&format!(
            "theta_hat = {:.6} (theta = {}), {} steps consumed\n",
            only.theta_hat, inputs.theta, only.total_steps
        ));
    } else {
        out.report.push_str(&format!(
            "{runs} meta-runs: {failures} misses of epsilon = {} (rate {:.4}, alpha = {}), mean cost {:.1} steps\n",
            cfg.epsilon,
            rate,
            cfg.alpha,
            steps as f64 / runs as f64
        ));
    }
    if !valid {
        out.violations.push(format!(
            "failure rate {rate} exceeds alpha {} + 2 stderr ({se})",
            cfg.alpha
        ));
    }
    let mut summary = Table::new(SUMMARY_COLUMNS);
    summary.push(vec![
        Cell::from(cfg.model.to_string()),
        Cell::from(inputs.source.to_string()),
        Cell::from(cfg.epsilon),
        Cell::from(cfg.alpha),
        Cell::from(p.n),
        Cell::from(p.l),
        Cell::from(runs),
        Cell::from(failures),
        Cell::from(rate),
        Cell::from(if runs < 2 { f64::NAN } else { se }),
        Cell::from(steps as f64 / runs as f64),
        Cell::from(valid),
    ]);
    out.tables.push(("estimate".to_string(), rows));
    out.tables.push(("estimate_summary".to_string(), summary));
    out.tables.push(("estimate_plan".to_string(), plan_table(cfg, &inputs, &p)));
    Ok(out)
}

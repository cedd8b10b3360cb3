//! Empirical MSE and mean overshoot of the sequential estimator against their
//! bounds, for the Gibbs sampler.

use rayon::prelude::*;
use regen_mcmc::accum::MeanStd;
use regen_mcmc::bounds::{mse_bound, overshoot_bound};
use regen_mcmc::estimator::single_estimate;
use regen_mcmc::models::GibbsNormalModel;
use regen_mcmc::seed::{domain_id, stream_rng};

use super::{combined_stderr, simulate_tau_moments, tau2_domain, within_bound};
use crate::config::ExperimentConfig;
use crate::error::ExperimentError;
use crate::output::Output;
use crate::table::{Cell, Table};

pub const COLUMNS: [&str; 12] = [
    "n",
    "a",
    "mse_empirical",
    "bound_mse",
    "overshoot_empirical",
    "bound_overshoot",
    "m_exact",
    "beta",
    "mc_stderr_mse",
    "mc_stderr_os",
    "stderr_bound_mse",
    "stderr_bound_overshoot",
];

/// One cell of the table: `replications` independent runs at `(a, n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Table1Row {
    pub n: u64,
    pub a: f64,
    pub mse: MeanStd,
    pub overshoot: MeanStd,
    pub bound_mse: f64,
    pub bound_mse_stderr: f64,
    pub bound_overshoot: f64,
    pub bound_overshoot_stderr: f64,
    pub m_exact: f64,
    pub beta: f64,
}

pub fn run(cfg: &ExperimentConfig) -> Result<Output, ExperimentError> {
    let mut rows = Vec::new();
    for &a in &cfg.a_values {
        let model = GibbsNormalModel::new(cfg.t, a)?;
        let truth = model.truth();
        let tau = simulate_tau_moments(&model, cfg.tau2_run_tours, cfg.master_seed, &tau2_domain(cfg.t, a))?;
        let (n0, n0_se) = tau.n0_with_exact_m(truth.m);
        // `overshoot_bound` checks Eτ² >= (Eτ)²; it reproduces `n0` exactly.
        let bound_os = overshoot_bound(truth.m, tau.e_tau_sq)?;
        for &n in &cfg.n_values {
            let domain = domain_id(&format!("table1:t={}:a={a}:n={n}", cfg.t));
            let obs = GibbsNormalModel::observable();
            let estimates = (0..cfg.replications)
                .into_par_iter()
                .map(|r| {
                    let mut rng = stream_rng(cfg.master_seed, domain, r);
                    single_estimate(&model, &obs, n, &mut rng)
                })
                .collect::<Result<Vec<_>, _>>()?;
            let mut mse = MeanStd::new();
            let mut overshoot = MeanStd::new();
            for e in &estimates {
                mse.push((e.theta_hat - truth.theta).powi(2));
                overshoot.push(e.overshoot as f64);
            }
            let bound_mse = mse_bound(truth.sigma_as_sq, n0, n)?;
            rows.push(Table1Row {
                n,
                a,
                mse,
                overshoot,
                bound_mse,
                bound_mse_stderr: truth.sigma_as_sq / (n * n) as f64 * n0_se,
                bound_overshoot: bound_os,
                bound_overshoot_stderr: n0_se,
                m_exact: truth.m,
                beta: model.minorization().beta,
            });
        }
    }
    Ok(render(cfg, &rows))
}

fn render(cfg: &ExperimentConfig, rows: &[Table1Row]) -> Output {
    let mut table = Table::new(COLUMNS);
    let mut out = Output::default();
    out.report.push_str(&format!(
        "Table 1: Gibbs sampler, t = {}, {} replications, E tau^2 from {} tours\n",
        cfg.t, cfg.replications, cfg.tau2_run_tours
    ));
    out.report.push_str("    n        a   MSE       BoundMSE  OS        BoundOS   m         beta\n");
    for r in rows {
        table.push(vec![
            Cell::from(r.n),
            Cell::from(r.a),
            Cell::from(r.mse.mean()),
            Cell::from(r.bound_mse),
            Cell::from(r.overshoot.mean()),
            Cell::from(r.bound_overshoot),
            Cell::from(r.m_exact),
            Cell::from(r.beta),
            Cell::from(r.mse.stderr()),
            Cell::from(r.overshoot.stderr()),
            Cell::from(r.bound_mse_stderr),
            Cell::from(r.bound_overshoot_stderr),
        ]);
        out.report.push_str(&format!(
            "{:>5} {:>8} {:<9.4} {:<9.4} {:<9.4} {:<9.4} {:<9.4} {:.4}\n",
            r.n,
            r.a,
            r.mse.mean(),
            r.bound_mse,
            r.overshoot.mean(),
            r.bound_overshoot,
            r.m_exact,
            r.beta
        ));
        let se = combined_stderr(r.mse.stderr(), r.bound_mse_stderr);
        if !within_bound(r.mse.mean(), r.bound_mse, se, 4.0) {
            out.violations.push(format!(
                "MSE {} above bound {} at n = {}, a = {}",
                r.mse.mean(),
                r.bound_mse,
                r.n,
                r.a
            ));
        }
        let se = combined_stderr(r.overshoot.stderr(), r.bound_overshoot_stderr);
        if !within_bound(r.overshoot.mean(), r.bound_overshoot, se, 4.0) {
            out.violations.push(format!(
                "overshoot {} above bound {} at n = {}, a = {}",
                r.overshoot.mean(),
                r.bound_overshoot,
                r.n,
                r.a
            ));
        }
    }
    out.tables.push(("table1".to_string(), table));
    out
}

//! Sharpness check on the two-state chain, where every quantity is known in
//! closed form.

use rayon::prelude::*;
use regen_mcmc::accum::{ratio_estimate, MeanStd};
use regen_mcmc::bounds::{asvar_reversible_uniform, asvar_uniform};
use regen_mcmc::models::TwoStateChain;
use regen_mcmc::regen::{run_sequential, Observable, RunOptions, Start};
use regen_mcmc::seed::{domain_id, stream_rng};

use super::{collect_tours, within_bound};
use crate::config::ExperimentConfig;
use crate::error::ExperimentError;
use crate::output::Output;
use crate::table::{Cell, Table};

pub const COLUMNS: [&str; 6] = ["quantity", "exact", "empirical", "stderr", "bound", "status"];

/// Tolerance for the reversible bound to count as equal to the exact value.
pub const SHARPNESS_TOLERANCE: f64 = 1e-12;

/// Block-based estimates of `σ²_as = E Ξ(f̄)²/Eτ` and `n₀ = Eτ²/Eτ − 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockEstimates {
    pub sigma_as_sq: f64,
    pub sigma_as_sq_stderr: f64,
    pub n0: f64,
    pub n0_stderr: f64,
}

pub fn block_estimates(chain: &TwoStateChain, tours: u64, master_seed: u64) -> Result<BlockEstimates, ExperimentError> {
    let centred = Observable::new(|x: &u8| f64::from(*x) - 0.5);
    let blocks = collect_tours(chain, &centred, tours, master_seed, "twostate-blocks", |t| {
        (t.block_sum * t.block_sum, t.length as f64)
    })?;
    let (sq, len): (Vec<f64>, Vec<f64>) = blocks.into_iter().unzip();
    let len_sq: Vec<f64> = len.iter().map(|l| l * l).collect();
    let (sigma_as_sq, sigma_as_sq_stderr) = ratio_estimate(&sq, &len);
    let (ratio, n0_stderr) = ratio_estimate(&len_sq, &len);
    Ok(BlockEstimates {
        sigma_as_sq,
        sigma_as_sq_stderr,
        n0: ratio - 1.0,
        n0_stderr,
    })
}

/// Mean overshoot `EΔ(n)` over `replications` runs from `ν`.
pub fn mean_overshoot(chain: &TwoStateChain, n: u64, replications: u64, master_seed: u64) -> Result<MeanStd, ExperimentError> {
    let domain = domain_id(&format!("twostate-overshoot:n={n}"));
    let obs = TwoStateChain::observable();
    let overshoots = (0..replications)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream_rng(master_seed, domain, r);
            run_sequential(chain, &obs, n, Start::FromNu, &RunOptions::default(), &mut rng)
                .map(|run| run.overshoot as f64)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(overshoots.into_iter().collect())
}

pub fn run(cfg: &ExperimentConfig) -> Result<Output, ExperimentError> {
    let chain = TwoStateChain::new(cfg.beta)?;
    let truth = chain.truth();
    let est = block_estimates(&chain, cfg.tours, cfg.master_seed)?;
    let general = asvar_uniform(truth.sigma_sq, cfg.beta)?;
    let reversible = asvar_reversible_uniform(truth.sigma_sq, cfg.beta)?;

    let mut table = Table::new(COLUMNS);
    let mut out = Output::default();
    let mut row = |out: &mut Output, name: String, exact: f64, emp: f64, se: f64, bound: f64, ok: bool| {
        table.push(vec![
            Cell::from(name.clone()),
            Cell::from(exact),
            Cell::from(emp),
            Cell::from(se),
            Cell::from(bound),
            Cell::from(ok),
        ]);
        out.report.push_str(&format!(
            "{:<28} exact {:<10.6} empirical {:<10.6} bound {:<10.6} {}\n",
            name,
            exact,
            emp,
            bound,
            if ok { "pass" } else { "FAIL" }
        ));
        if !ok {
            out.violations.push(format!("{name}: check failed"));
        }
    };
    out.report.push_str(&format!(
        "Two-state chain, beta = {}, {} tours\n",
        cfg.beta, cfg.tours
    ));
    let nan = f64::NAN;
    let agrees = |emp: f64, exact: f64, se: f64| (emp - exact).abs() <= 4.0 * se;
    row(
        &mut out,
        "sigma_as_sq".into(),
        truth.sigma_as_sq,
        est.sigma_as_sq,
        est.sigma_as_sq_stderr,
        reversible,
        agrees(est.sigma_as_sq, truth.sigma_as_sq, est.sigma_as_sq_stderr),
    );
    row(&mut out, "n0".into(), truth.n0, est.n0, est.n0_stderr, nan, agrees(est.n0, truth.n0, est.n0_stderr));
    row(
        &mut out,
        "asvar_uniform".into(),
        truth.sigma_as_sq,
        nan,
        nan,
        general.exact_form,
        general.exact_form >= truth.sigma_as_sq,
    );
    row(
        &mut out,
        "asvar_uniform_simple".into(),
        truth.sigma_as_sq,
        nan,
        nan,
        general.simple_form,
        general.simple_form >= general.exact_form,
    );
    row(
        &mut out,
        "asvar_reversible_uniform".into(),
        truth.sigma_as_sq,
        nan,
        nan,
        reversible,
        (reversible - truth.sigma_as_sq).abs() <= SHARPNESS_TOLERANCE,
    );
    // Lorden: EΔ(n) <= 2 EΔ(∞) = n₀.
    for &n in &cfg.lorden_n {
        let os = mean_overshoot(&chain, n, cfg.replications, cfg.master_seed)?;
        row(
            &mut out,
            format!("overshoot_n{n}"),
            nan,
            os.mean(),
            os.stderr(),
            truth.n0,
            within_bound(os.mean(), truth.n0, os.stderr(), 4.0),
        );
    }
    out.tables.push(("twostate_check".to_string(), table));
    Ok(out)
}

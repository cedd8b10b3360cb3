//! Long-run estimate of the tour-length moments `Eτ` and `Eτ²`.

use regen_mcmc::models::{GibbsNormalModel, TwoStateChain};

use super::{simulate_tau_moments, tau2_domain, TauMoments};
use crate::config::{ExperimentConfig, ModelKind};
use crate::error::ExperimentError;
use crate::output::Output;
use crate::table::{Cell, Table};

pub const COLUMNS: [&str; 13] = [
    "model",
    "t",
    "a",
    "beta",
    "tours",
    "m_exact",
    "e_tau",
    "stderr_e_tau",
    "e_tau_sq",
    "stderr_e_tau_sq",
    "n0",
    "stderr_n0",
    "n0_ratio",
];

fn push_row(table: &mut Table, out: &mut Output, label: [Cell; 4], m: f64, tau: &TauMoments) {
    let (n0, n0_se) = tau.n0_with_exact_m(m);
    let mut cells = label.to_vec();
    cells.extend([
        Cell::from(tau.tours),
        Cell::from(m),
        Cell::from(tau.e_tau),
        Cell::from(tau.e_tau_stderr),
        Cell::from(tau.e_tau_sq),
        Cell::from(tau.e_tau_sq_stderr),
        Cell::from(n0),
        Cell::from(n0_se),
        Cell::from(tau.n0_ratio),
    ]);
    table.push(cells);
    out.report.push_str(&format!(
        "m = {m:.6}, E tau = {:.6} ± {:.1e}, E tau^2 = {:.6} ± {:.1e}, n0 = {n0:.6} ± {n0_se:.1e}\n",
        tau.e_tau, tau.e_tau_stderr, tau.e_tau_sq, tau.e_tau_sq_stderr
    ));
}

pub fn run(cfg: &ExperimentConfig) -> Result<Output, ExperimentError> {
    let mut table = Table::new(COLUMNS);
    let mut out = Output::default();
    match cfg.model {
        ModelKind::Gibbs => {
            for &a in &cfg.a_values {
                let model = GibbsNormalModel::new(cfg.t, a)?;
                let tau = simulate_tau_moments(&model, cfg.tau2_run_tours, cfg.master_seed, &tau2_domain(cfg.t, a))?;
                out.report.push_str(&format!("gibbs t = {}, a = {a}: ", cfg.t));
                let label = [
                    Cell::from("gibbs"),
                    Cell::from(cfg.t),
                    Cell::from(a),
                    Cell::from(model.minorization().beta),
                ];
                push_row(&mut table, &mut out, label, model.truth().m, &tau);
            }
        }
        ModelKind::TwoState => {
            let chain = TwoStateChain::new(cfg.beta)?;
            let tau = simulate_tau_moments(&chain, cfg.tau2_run_tours, cfg.master_seed, &format!("tau2:twostate:beta={}", cfg.beta))?;
            out.report.push_str(&format!("twostate beta = {}: ", cfg.beta));
            let label = [
                Cell::from("twostate"),
                Cell::from(f64::NAN),
                Cell::from(f64::NAN),
                Cell::from(cfg.beta),
            ];
            push_row(&mut table, &mut out, label, chain.truth().m, &tau);
        }
    }
    out.tables.push(("tau2".to_string(), table));
    Ok(out)
}

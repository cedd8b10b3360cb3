//! Files produced by a command: CSV tables, the metadata sidecar and plot
//! scripts.

use std::path::{Path, PathBuf};

use crate::config::ExperimentConfig;
use crate::error::ExperimentError;
use crate::table::Table;

/// Source revision recorded at build time, `unknown` outside a git checkout.
pub const GIT_REVISION: &str = env!("REGEN_GIT_REVISION");

/// Everything a command produced, kept in memory until written.
#[derive(Debug, Clone, Default)]
pub struct Output {
    /// Named tables, written as `<name>.csv`.
    pub tables: Vec<(String, Table)>,
    /// Extra text files (plot scripts), written under their given names.
    pub files: Vec<(String, String)>,
    /// Human-readable summary printed to stdout.
    pub report: String,
    /// Empirical values found above their bounds.
    pub violations: Vec<String>,
}

impl Output {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    /// Fails with the collected violations, if any.
    pub fn check(&self) -> Result<(), ExperimentError> {
        if self.violations.is_empty() {
            Ok(())
        } else {
            Err(ExperimentError::BoundViolation(self.violations.clone()))
        }
    }
}

/// Plain-text sidecar: command, configuration, seed and source revision.
pub fn metadata(command: &str, cfg: &ExperimentConfig) -> String {
    let mut s = String::new();
    s.push_str(&format!("command = {command}\n"));
    s.push_str(&format!("version = {}\n", env!("CARGO_PKG_VERSION")));
    s.push_str(&format!("git_revision = {GIT_REVISION}\n"));
    s.push_str(&format!("master_seed = {}\n", cfg.master_seed));
    s.push_str("# configuration\n");
    for (k, v) in cfg.to_key_values() {
        s.push_str(&format!("{k} = {v}\n"));
    }
    s
}

fn write(path: PathBuf, contents: &str) -> Result<PathBuf, ExperimentError> {
    std::fs::write(&path, contents).map_err(|source| ExperimentError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

/// Writes every table with a `<name>.meta.txt` sidecar, then the extra files.
pub fn write_output(
    dir: &Path,
    command: &str,
    cfg: &ExperimentConfig,
    out: &Output,
) -> Result<Vec<PathBuf>, ExperimentError> {
    std::fs::create_dir_all(dir).map_err(|source| ExperimentError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let meta = metadata(command, cfg);
    let mut written = Vec::new();
    for (name, table) in &out.tables {
        written.push(write(dir.join(format!("{name}.csv")), &table.to_csv())?);
        written.push(write(dir.join(format!("{name}.meta.txt")), &meta)?);
    }
    for (name, contents) in &out.files {
        written.push(write(dir.join(name), contents)?);
    }
    Ok(written)
}

/// Gnuplot script drawing the two sweep figures from `sweep.csv`.
pub fn sweep_plot_script(t: u32) -> String {
    format!(
        r#"# Render with: gnuplot sweep.gp
set datafile separator ','
set datafile missing 'NA'
set key autotitle columnhead
set terminal pngcairo size 800,560
set xlabel 'a'
set grid

set output 'sweep_asvar.png'
set title 'Bounds on the asymptotic variance, t = {t}'
set ylabel 'bound on sigma_as^2'
plot 'sweep.csv' using 'a':'bound_theorem_asvar' with lines lw 2 title 'theorem', \
     ''          using 'a':'bound_corollary_asvar' with lines lw 2 dt 2 title 'corollary'

set output 'sweep_n0.png'
set title 'Bounds on n0, t = {t}'
set ylabel 'bound on n0'
plot 'sweep.csv' using 'a':'bound_theorem_n0' with lines lw 2 title 'theorem', \
     ''          using 'a':'bound_corollary_n0' with lines lw 2 dt 2 title 'corollary'
"#
    )
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use regen_experiments::output::write_output;
use regen_experiments::{run_with_threads, Command, ConfigBuilder, ExperimentError};

/// Regenerative MCMC experiments: error-bound tables, bound sweeps and
/// fixed-precision estimation.
#[derive(Debug, Parser)]
#[command(name = "regen", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Master seed for every random stream.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads, or `auto`.
    #[arg(long, global = true)]
    threads: Option<String>,

    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Flat `key = value` configuration file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Any configuration key, as `key=value`; may be repeated.
    #[arg(long = "set", short = 's', global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Print the report only; write no files.
    #[arg(long, global = true)]
    dry_run: bool,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Compute the (n, l) plan for a target precision.
    Plan(ModelArgs),
    /// Plan and run the median-of-runs confidence procedure.
    Estimate(ModelArgs),
    /// MSE and mean overshoot against their bounds (Gibbs sampler).
    Table1(ModelArgs),
    /// Exact asymptotic variance and best bounds over a, per t.
    Table2(ModelArgs),
    /// Bounds as functions of a, with argmin summary and plot script.
    Sweep(ModelArgs),
    /// Closed-form versus simulated quantities for the two-state chain.
    TwostateCheck(ModelArgs),
    /// Long-run estimate of E tau and E tau^2.
    Tau2(ModelArgs),
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// `gibbs` or `twostate`.
    #[arg(long)]
    model: Option<String>,
    /// Two-state chain parameter in (0, 1/2].
    #[arg(long)]
    beta: Option<String>,
    /// Degrees of freedom of the Gibbs model.
    #[arg(long)]
    t: Option<String>,
    /// Small-set radius of the Gibbs model.
    #[arg(long)]
    a: Option<String>,
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    /// exact, drift-theorem, drift-corollary, uniform or uniform-reversible.
    #[arg(long)]
    source: Option<String>,
    #[arg(long)]
    replications: Option<String>,
    #[arg(long)]
    meta_runs: Option<String>,
}

impl Cmd {
    fn split(&self) -> (Command, &ModelArgs) {
        match self {
            Cmd::Plan(m) => (Command::Plan, m),
            Cmd::Estimate(m) => (Command::Estimate, m),
            Cmd::Table1(m) => (Command::Table1, m),
            Cmd::Table2(m) => (Command::Table2, m),
            Cmd::Sweep(m) => (Command::Sweep, m),
            Cmd::TwostateCheck(m) => (Command::TwostateCheck, m),
            Cmd::Tau2(m) => (Command::Tau2, m),
        }
    }
}

fn configure(cli: &Cli, args: &ModelArgs) -> Result<regen_experiments::ExperimentConfig, ExperimentError> {
    let mut b = ConfigBuilder::new();
    if let Some(path) = &cli.config {
        b.load_file(path)?;
    }
    for assignment in &cli.set {
        b.set_assignment(assignment)?;
    }
    let flags = [
        ("model", &args.model),
        ("beta", &args.beta),
        ("t", &args.t),
        ("a", &args.a),
        ("epsilon", &args.epsilon),
        ("alpha", &args.alpha),
        ("source", &args.source),
        ("replications", &args.replications),
        ("meta_runs", &args.meta_runs),
        ("threads", &cli.threads),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            b.set(key, v.as_str())?;
        }
    }
    if let Some(seed) = cli.seed {
        b.set("master_seed", seed.to_string())?;
    }
    if let Some(out) = &cli.out {
        b.set("output_dir", out.to_string_lossy())?;
    }
    Ok(b.build()?)
}

fn execute(cli: &Cli) -> Result<(), ExperimentError> {
    let (command, args) = cli.command.split();
    let cfg = configure(cli, args)?;
    let out = run_with_threads(command, &cfg)?;
    print!("{}", out.report);
    if !cli.dry_run {
        let written = write_output(&cfg.output_dir, command.name(), &cfg, &out)?;
        for path in written {
            println!("wrote {}", path.display());
        }
    }
    out.check()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    // Each error variant already renders its source, so the chain is not
    // walked when printing.
    match execute(&cli).map_err(anyhow::Error::from) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            let code = err
                .downcast_ref::<ExperimentError>()
                .map_or(1, ExperimentError::exit_code);
            ExitCode::from(code)
        }
    }
}

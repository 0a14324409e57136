use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use idla_core::harness::acceptance::Suite;
use idla_core::harness::output::{write_document, Format};
use idla_core::harness::{run_experiment, Execution, ExperimentConfig, ExperimentKind};
use idla_core::increments::LawSpec;

#[derive(Parser)]
#[command(name = "idla", version, about = "Long-range internal DLA experiments on Z")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Grow aggregates and report r_m/m and coverage times.
    Idla(Common),
    /// Exit-right frequency of [-cN, N] from 0.
    Gambler(Common),
    /// Frequency of hitting 0 before leaving [-cN, N], started at floor(yN).
    Hitprob(Common),
    /// Overshoot law over level y.
    Overshoot(Common),
    /// Ladder heights, stationary residual laws and the Spitzer series.
    Ladder(Common),
    /// Limit functions and constants, with error estimates.
    Theory(Common),
    /// Run the acceptance suite.
    Accept(Accept),
}

#[derive(Args)]
struct Common {
    /// Preset (simple, two-step, skip-free, stable) or a JSON law file.
    #[arg(long, default_value = "simple")]
    law: String,
    /// Stable index; selects the stable preset's alpha, or the theory alpha.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    m: Option<u64>,
    #[arg(long = "N")]
    n: Option<i64>,
    #[arg(long)]
    x: Option<u64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    y: Option<f64>,
    #[arg(long)]
    u: Option<f64>,
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    w: Option<f64>,
    #[arg(long = "A")]
    a: Option<f64>,
    #[arg(long = "B")]
    b: Option<f64>,
    /// Extra IDLA checkpoints, comma separated.
    #[arg(long, value_delimiter = ',')]
    checkpoints: Vec<u64>,
    #[arg(long, default_value_t = 100)]
    replicas: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Per-walk step cap.
    #[arg(long = "max-steps")]
    max_steps: Option<u64>,
    /// Total step budget, split evenly over replicas.
    #[arg(long)]
    budget: Option<u64>,
    /// Additive slack for comparisons against limits.
    #[arg(long)]
    slack: Option<f64>,
    /// Run replicas one after another.
    #[arg(long)]
    sequential: bool,
    /// Leave wall-clock time out of the document.
    #[arg(long = "no-timing")]
    no_timing: bool,
    /// Print the resolved config as JSON and exit without running.
    #[arg(long = "dry-run")]
    dry_run: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct Accept {
    /// Criteria to run, comma separated (default: all).
    #[arg(long, value_delimiter = ',')]
    only: Vec<u32>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    sequential: bool,
    /// Write the per-criterion verdicts as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn law_from(arg: &str, alpha: Option<f64>) -> Result<LawSpec> {
    if let Some(spec) = LawSpec::preset(arg, alpha) {
        return Ok(spec);
    }
    let text = std::fs::read_to_string(arg)
        .with_context(|| format!("{arg:?} is neither a preset (simple, two-step, skip-free, stable) nor a readable file"))?;
    serde_json::from_str(&text).with_context(|| format!("parsing law file {arg}"))
}

fn config(kind: ExperimentKind, o: &Common) -> Result<ExperimentConfig> {
    let mut c = ExperimentConfig::new(kind, law_from(&o.law, o.alpha)?);
    c.m = o.m;
    c.n = o.n;
    c.x = o.x;
    c.y = o.y;
    c.c = o.c;
    c.alpha = o.alpha;
    c.u = o.u;
    c.s = o.s;
    c.w = o.w;
    c.a = o.a;
    c.b = o.b;
    c.checkpoints = o.checkpoints.clone();
    c.replicas = o.replicas;
    c.seed = o.seed;
    if let Some(cap) = o.max_steps {
        c.step_cap = cap;
    }
    c.step_budget = o.budget;
    c.slack = o.slack;
    c.execution = if o.sequential { Execution::Sequential } else { Execution::Parallel };
    c.record_wall_time = !o.no_timing;
    Ok(c)
}

fn experiment(kind: ExperimentKind, o: &Common) -> Result<bool> {
    let c = config(kind, o)?;
    if o.dry_run {
        println!("{}", serde_json::to_string_pretty(&c)?);
        return Ok(true);
    }
    let doc = run_experiment(&c)?;
    write_document(&doc, o.format, o.out.as_deref())?;
    for v in doc.verdicts.iter().filter(|v| !v.pass) {
        eprintln!("{}", v.line());
    }
    for f in &doc.failures {
        eprintln!("replica {}: {}", f.replica, f.error);
    }
    Ok(doc.pass)
}

fn accept(a: &Accept) -> Result<bool> {
    if let Some(bad) = a.only.iter().find(|&&i| !(1..=11).contains(&i)) {
        bail!("no criterion {bad} (criteria are 1 to 11)");
    }
    let mut suite = Suite::default();
    if let Some(seed) = a.seed {
        suite.seed = seed;
    }
    if a.sequential {
        suite.execution = Execution::Sequential;
    }
    let results = suite.run(&a.only, |c| println!("{}", c.line()));
    if let Some(p) = &a.out {
        std::fs::write(p, serde_json::to_string_pretty(&results)? + "\n").with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(results.iter().all(|c| c.pass))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Idla(o) => experiment(ExperimentKind::Idla, o),
        Command::Gambler(o) => experiment(ExperimentKind::Gambler, o),
        Command::Hitprob(o) => experiment(ExperimentKind::Hitprob, o),
        Command::Overshoot(o) => experiment(ExperimentKind::Overshoot, o),
        Command::Ladder(o) => experiment(ExperimentKind::Ladder, o),
        Command::Theory(o) => experiment(ExperimentKind::Theory, o),
        Command::Accept(a) => accept(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

use anyhow::{Context, Result};
use bhc_cli::{budget_from_env, run, Experiment, ExperimentConfig};
use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "bhc-lab", version, about = "Runs the numerical experiments and writes CSV and summary JSON")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment; exits 0 on pass, 1 on acceptance failure, 2 on error.
    Run(RunArgs),
    /// Print the embedded default configuration of an experiment as TOML.
    Config { experiment: String },
}

#[derive(Parser)]
struct RunArgs {
    /// gabor | multiplier | decay | weyl | levelset | tiles | counterexample | dominate
    experiment: Option<String>,
    /// TOML or JSON configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for the parallel loops.
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Acceptance slack factor.
    #[arg(long)]
    slack: Option<f64>,
    /// Comma-separated am ladder.
    #[arg(long, value_delimiter = ',')]
    am: Option<Vec<u32>>,
}

fn resolve(args: &RunArgs) -> Result<ExperimentConfig> {
    let named = args.experiment.as_deref().map(str::parse::<Experiment>).transpose()?;
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path, named)?,
        None => ExperimentConfig::defaults(named.context("name an experiment or pass --config")?),
    };
    if let Some(e) = named {
        cfg.experiment = e;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &args.out {
        cfg.output.dir = out.clone();
    }
    if let Some(slack) = args.slack {
        cfg.slack.factor = slack;
    }
    if let Some(am) = &args.am {
        cfg.am = am.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(args: RunArgs) -> Result<bool> {
    let cfg = resolve(&args)?;
    if let Some(n) = args.workers {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring workers")?;
    }
    let budget = budget_from_env()?;
    let outcome = run(&cfg, &budget)?;
    let dir = &cfg.output.dir;
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let name = cfg.experiment.name();
    std::fs::write(dir.join(format!("{name}.csv")), &outcome.csv)?;
    let summary = serde_json::to_string_pretty(&outcome.summary(&cfg))?;
    std::fs::write(dir.join(format!("{name}.json")), format!("{summary}\n"))?;
    println!("{summary}");
    Ok(outcome.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => execute(args),
        Command::Config { experiment } => experiment
            .parse()
            .and_then(|e| ExperimentConfig::defaults(e).to_toml())
            .map(|t| {
                print!("{t}");
                true
            }),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

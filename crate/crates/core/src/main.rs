use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use equicont::harness::{catalog, is_config_error, lookup, run, ExperimentConfig, RunMode};

#[derive(Parser)]
#[command(name = "equicont", version, about = "Equivariant continuation of geometric critical points")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify equivariant nondegeneracy at the configured critical point.
    Analyze(RunArgs),
    /// Continue the critical orbit to `run.lambda_target`.
    Continue(RunArgs),
    /// Gradient, equivariance and invariance suites at random states.
    Verify(RunArgs),
    /// Project random group translates back onto the slice.
    Project(RunArgs),
    /// Built-in problems and their parameter ranges.
    List {
        /// Print each entry's default configuration as TOML.
        #[arg(long)]
        configs: bool,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, conflicts_with = "problem")]
    config: Option<PathBuf>,
    /// Catalog entry to run instead of a config file.
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Grid size override.
    #[arg(long)]
    n: Option<usize>,
}

fn load(args: &RunArgs, mode: RunMode) -> equicont::Result<ExperimentConfig> {
    let mut config = match (&args.config, &args.problem) {
        (Some(path), _) => ExperimentConfig::load(path)?,
        (None, Some(name)) => lookup(name)?.config,
        (None, None) => return Err(equicont::Error::Config("pass --config <path> or --problem <name>".into())),
    };
    config.run.mode = mode;
    if let Some(seed) = args.seed {
        config.run.seed = seed;
    }
    if let Some(n) = args.n {
        config.grid.n = n;
    }
    if args.out.is_some() {
        config.output = args.out.clone();
    }
    Ok(config)
}

fn execute(args: RunArgs, mode: RunMode) -> ExitCode {
    let config = match load(&args, mode) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match run(&config, config.output.as_deref()) {
        Ok(report) => {
            for c in &report.checks {
                let mark = if c.passed { "pass" } else { "FAIL" };
                println!("{mark} {:<32} {:e} (threshold {:e})", c.name, c.value, c.threshold);
            }
            if let Some(b) = &report.branch {
                println!("branch {:?}: {} samples, λ = {}", b.status, b.samples, b.lambda_reached);
            }
            if let Some(e) = &report.error {
                eprintln!("solver failure: {e}");
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if is_config_error(&e) { 2 } else { 3 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Analyze(a) => execute(a, RunMode::Analyze),
        Command::Continue(a) => execute(a, RunMode::Continue),
        Command::Verify(a) => execute(a, RunMode::Verify),
        Command::Project(a) => execute(a, RunMode::Project),
        Command::List { configs } => {
            for e in catalog() {
                println!("{:<18} λ ∈ [{}, {}]  {}", e.name, e.lambda_range.0, e.lambda_range.1, e.description);
                if configs {
                    match e.config.to_toml() {
                        Ok(t) => println!("{t}"),
                        Err(err) => eprintln!("error: {err}"),
                    }
                }
            }
            ExitCode::SUCCESS
        }
    }
}

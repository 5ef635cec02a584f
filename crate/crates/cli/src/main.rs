use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use halfstokes_cli::config::{RunConfig, Suite};
use halfstokes_cli::{prepare_output, run};

#[derive(Parser)]
#[command(
    name = "halfstokes",
    version,
    about = "Rate verification suites for half-space Stokes kernels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite from a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        suite: Option<Suite>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Print the default config with field descriptions.
    PrintDefaults,
}

fn load(
    path: &PathBuf,
    suite: Option<Suite>,
    out: Option<PathBuf>,
    seed: Option<u64>,
    workers: Option<usize>,
) -> Result<RunConfig> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut cfg = RunConfig::from_json(&text)?;
    cfg.apply_env(|k| std::env::var(k).ok())?;
    if let Some(s) = suite {
        cfg.suite = s;
    }
    if let Some(o) = out {
        cfg.output_dir = o;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(w) = workers {
        cfg.workers = Some(w);
    }
    cfg.validate()?;
    prepare_output(&cfg.output_dir)?;
    if let Some(w) = cfg.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .context("configuring the worker pool")?;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::PrintDefaults => {
            match serde_json::to_string_pretty(&RunConfig::documented()) {
                Ok(s) => println!("{s}"),
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            }
            ExitCode::SUCCESS
        }
        Command::Run {
            config,
            suite,
            out,
            seed,
            workers,
        } => {
            let cfg = match load(&config, suite, out, seed, workers) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("config error: {e:#}");
                    return ExitCode::from(2);
                }
            };
            match run(&cfg) {
                Ok(r) if r.passed => {
                    println!(
                        "all checks passed; report in {}",
                        cfg.output_dir.join("report.json").display()
                    );
                    ExitCode::SUCCESS
                }
                Ok(r) => {
                    for f in &r.failing {
                        eprintln!("failed: {f}");
                    }
                    ExitCode::from(1)
                }
                Err(e) => {
                    eprintln!("error: {e:#}");
                    ExitCode::from(1)
                }
            }
        }
    }
}

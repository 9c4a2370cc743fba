//! `accessgap`: estimate information access, measure advantage, and augment
//! networks to raise the minimum pairwise access.

mod config;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use config::{resolve, AugmentArgs, CommonArgs, ConfigError, Extra, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "accessgap", version, about)]
struct Cli {
    /// Worker threads [default: all cores]; never changes any output
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Monte Carlo access estimate: access.csv, advantage.csv, estimate.bin
    Estimate {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run an augmentation heuristic: trace.csv, augmented.edges, metrics_k*.json
    Augment {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        augment: AugmentArgs,
    },
    /// Metrics bundle for a graph, optionally from a stored estimate.bin
    Evaluate {
        #[command(flatten)]
        common: CommonArgs,
        /// Reuse a binary estimate written by `estimate` instead of sampling
        #[arg(long)]
        estimate: Option<PathBuf>,
    },
    /// Exact access matrix by enumeration (small graphs only)
    Oracle {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Spread of estimates across repeated seeds
    Stability {
        #[command(flatten)]
        common: CommonArgs,
        /// Repetitions, seeds seed..seed+reps [default: 10]
        #[arg(long)]
        reps: Option<u32>,
    },
    /// Access centrality; costs two full estimations per node
    Control {
        #[command(flatten)]
        common: CommonArgs,
        /// Original node ids to report [default: every node]
        #[arg(long, value_delimiter = ',')]
        nodes: Vec<u64>,
    },
    /// Changes between two metrics bundles
    Compare {
        #[arg(long)]
        before: PathBuf,
        #[arg(long)]
        after: PathBuf,
        /// Write the report here instead of stdout
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn configs(common: &CommonArgs, extra: Extra) -> Result<Vec<RunConfig>> {
    resolve(common, &extra)
}

fn each(cfgs: Vec<RunConfig>, f: impl Fn(&RunConfig) -> Result<()>) -> Result<()> {
    for cfg in &cfgs {
        log::info!("alpha {} -> {}", cfg.alpha, cfg.output_dir.display());
        f(cfg)?;
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(ConfigError::new("threads", "must be positive").into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    }
    match cli.command {
        Command::Estimate { common } => each(configs(&common, Extra::default())?, run::estimate),
        Command::Augment { common, augment } => {
            let extra = Extra {
                augment,
                ..Default::default()
            };
            each(configs(&common, extra)?, run::augment_cmd)
        }
        Command::Evaluate { common, estimate } => each(configs(&common, Extra::default())?, |c| {
            run::evaluate(c, estimate.as_deref())
        }),
        Command::Oracle { common } => each(configs(&common, Extra::default())?, run::oracle),
        Command::Stability { common, reps } => {
            let extra = Extra {
                reps,
                ..Default::default()
            };
            each(configs(&common, extra)?, run::stability)
        }
        Command::Control { common, nodes } => {
            let extra = Extra {
                nodes,
                ..Default::default()
            };
            each(configs(&common, extra)?, run::control)
        }
        Command::Compare {
            before,
            after,
            output,
        } => run::compare(&before, &after, output.as_deref()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ConfigError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

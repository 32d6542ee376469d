use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use crowdnav_harness::run::{self, CURVE_FILE, POLICY_FILE, RESULTS_FILE};
use crowdnav_harness::{ExperimentConfig, Result};

/// Seeded crowd-navigation experiments.
#[derive(Parser)]
#[command(name = "crowdnav", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a policy over seeded episodes.
    Eval(Common),
    /// Write the reward surface around a single human.
    Surface(Common),
    /// Optimize a potential-field policy with the cross-entropy method.
    Learn(Common),
    /// Recompute metrics from recorded episode files or directories.
    Replay {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    /// TOML experiment file; defaults apply when omitted.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Seed base (eval) or optimizer seed (learn).
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Evaluation episodes (eval) or held-out episodes per curve point (learn).
    #[arg(long, value_name = "N")]
    episodes: Option<usize>,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

impl Common {
    fn load(&self, learning: bool) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if self.out.is_none() && self.config.is_some() {
            cfg.output_dir = cfg.resolve(&cfg.output_dir.clone());
        }
        if let Some(out) = &self.out {
            cfg.output_dir = out.clone();
        }
        if let Some(seed) = self.seed {
            if learning {
                cfg.learner.seed = seed;
            }
            cfg.seed_base = seed;
        }
        if let Some(n) = self.episodes {
            if learning {
                cfg.learner.eval_episodes = n;
            } else {
                cfg.episodes = n;
            }
        }
        cfg.validate().map_err(crowdnav_harness::HarnessError::from)?;
        Ok(cfg)
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Eval(c) => {
            let cfg = c.load(false)?;
            let report = run::run_eval(&cfg)?;
            print!("{}", report.render());
            println!("wrote {}", cfg.output_dir.join(RESULTS_FILE).display());
        }
        Command::Surface(c) => {
            let cfg = c.load(false)?;
            println!("wrote {}", run::run_surface(&cfg)?.display());
        }
        Command::Learn(c) => {
            let cfg = c.load(true)?;
            println!("{}", crowdnav_core::learner::CURVE_HEADER);
            run::run_learning_campaign(&cfg, |row| println!("{row}"))?;
            println!(
                "wrote {} and {}",
                cfg.output_dir.join(CURVE_FILE).display(),
                cfg.output_dir.join(POLICY_FILE).display()
            );
        }
        Command::Replay { paths } => print!("{}", run::replay(&paths)?.render()),
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("crowdnav: {e}");
            ExitCode::FAILURE
        }
    }
}

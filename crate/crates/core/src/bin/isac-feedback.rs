use std::fs;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use isac_feedback::harness::{
    design_report, fig2_csv, fig3_csv, run_fig2, run_fig3, run_trial_with, Fig2Plan, Fig3Plan,
    Method,
};
use isac_feedback::{Result, SystemConfig};

#[derive(Parser)]
#[command(version, about = "Feedback design, sweeps and single trials")]
struct Cli {
    /// Overrides the seed of the loaded configuration.
    #[arg(long, global = true, env = "ISAC_SEED")]
    seed: Option<u64>,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true, env = "ISAC_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Design one feedback matrix and write it with its iteration history.
    Design {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        index: u64,
    },
    /// Error probability against user count and feedback length.
    Fig2 {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also dump every trial as JSON.
        #[arg(long)]
        results: Option<PathBuf>,
    },
    /// Communication/sensing trade-off over the weight and feedback length.
    Fig3 {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        results: Option<PathBuf>,
    },
    /// Run one trial and print its metrics as JSON.
    Trial {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        index: u64,
        #[arg(long, default_value = "pgd")]
        method: Method,
    },
}

fn load_system(path: &PathBuf, seed: Option<u64>) -> Result<SystemConfig> {
    let mut cfg = SystemConfig::from_json(&fs::read_to_string(path)?)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Design { config, out, index } => {
            let cfg = load_system(&config, cli.seed)?;
            let report = design_report(&cfg, index)?;
            fs::write(out, serde_json::to_string_pretty(&report)?)?;
        }
        Command::Fig2 {
            config,
            out,
            results,
        } => {
            let mut plan = Fig2Plan::from_json(&fs::read_to_string(config)?)?;
            if let Some(s) = cli.seed {
                plan.system.seed = s;
            }
            let res = run_fig2(&plan, cli.threads)?;
            fs::write(out, fig2_csv(&plan, &res)?)?;
            if let Some(p) = results {
                fs::write(p, serde_json::to_string(&res)?)?;
            }
        }
        Command::Fig3 {
            config,
            out,
            results,
        } => {
            let mut plan = Fig3Plan::from_json(&fs::read_to_string(config)?)?;
            if let Some(s) = cli.seed {
                plan.system.seed = s;
            }
            let res = run_fig3(&plan, cli.threads)?;
            fs::write(out, fig3_csv(&plan, &res)?)?;
            if let Some(p) = results {
                fs::write(p, serde_json::to_string(&res)?)?;
            }
        }
        Command::Trial {
            config,
            index,
            method,
        } => {
            let cfg = load_system(&config, cli.seed)?;
            let m = run_trial_with(&cfg, index, method)?;
            println!("{}", serde_json::to_string_pretty(&m)?);
        }
    }
    Ok(())
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

//! `nomf`: denoise, simulate, characterise, cost and evaluate binary
//! event-camera frames.

mod commands;
mod config;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use commands::denoise::FilterKind;
use config::{ConfigError, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "nomf", version, about = "Median filtering of event-camera binary frames, in software and in a simulated SRAM macro")]
struct Cli {
    /// Flat `key = value` configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Base RNG seed; overrides the config file.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    /// Output directory; overrides the config file.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct InputArg {
    /// PBM directory, single PBM file, or `t,x,y,p` event stream.
    #[arg(long, short)]
    input: PathBuf,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Filter frames and write PBM outputs plus a per-frame report.
    Denoise {
        #[command(flatten)]
        input: InputArg,
        #[arg(long, value_enum, default_value = "nomf")]
        filter: FilterKind,
    },
    /// Same as `denoise --filter imc`.
    Simulate {
        #[command(flatten)]
        input: InputArg,
    },
    /// Sweep stored patterns on the simulated macro and report bit error ratios.
    Characterize {
        /// Ones per window, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "5")]
        k: Vec<usize>,
        /// Supply voltages, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "0.7,0.8,1.0,1.2")]
        vdd: Vec<f64>,
        /// Trials per pattern; overrides the config file.
        #[arg(long)]
        trials: Option<usize>,
        /// `all` or a number of patterns to sample.
        #[arg(long, default_value = "all")]
        patterns: String,
    },
    /// Report analytic operation counts, latency, energy and throughput.
    Perf,
    /// Run OMF and NOMF tracking pipelines and score them against ground truth.
    TrackEval {
        /// Directory of recordings (`gt.csv` plus frames or `events.txt`).
        #[command(flatten)]
        input: InputArg,
    },
    /// Score `pred.csv` against `gt.csv` in each recording directory.
    Eval {
        #[command(flatten)]
        input: InputArg,
    },
    /// Write a synthetic traffic dataset.
    Gen {
        /// Write `events.txt` streams instead of PBM frames.
        #[arg(long)]
        events: bool,
    },
}

enum Failure {
    Config(ConfigError),
    Run(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Run(e)
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?.map_err(Failure::Config)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.out = o.clone();
    }
    if let Command::Characterize { trials: Some(t), .. } = cli.command {
        cfg.trials = t;
    }
    cfg.validate().map_err(Failure::Config)?;
    Ok(cfg)
}

fn check_input(p: &std::path::Path) -> Result<()> {
    if !p.exists() {
        anyhow::bail!("input {} does not exist", p.display());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = load_config(&cli)?;
    match cli.command {
        Command::Denoise { input, filter } => denoise(&cfg, &input.input, filter)?,
        Command::Simulate { input } => denoise(&cfg, &input.input, FilterKind::Imc)?,
        Command::Characterize { k, vdd, patterns, .. } => {
            let req = commands::characterize::Request {
                ks: k,
                vdds: vdd,
                patterns: commands::characterize::parse_patterns(&patterns, cfg.seed)?,
            };
            let rows = commands::characterize::run(&cfg, &req)?;
            println!("wrote {rows} pattern rows to {}", cfg.out.join("characterize.csv").display());
        }
        Command::Perf => print!("{}", commands::perf::run(&cfg)?),
        Command::TrackEval { input } => {
            check_input(&input.input)?;
            let s = commands::track::run_track_eval(&cfg, &input.input)?;
            println!(
                "AUC omf {:.4}, nomf {:.4}, difference {:+.4}",
                s.auc_omf,
                s.auc_nomf,
                s.auc_nomf - s.auc_omf
            );
        }
        Command::Eval { input } => {
            check_input(&input.input)?;
            let auc = commands::track::run_eval(&cfg, &input.input)?;
            println!("AUC {auc:.4}");
        }
        Command::Gen { events } => {
            let n = commands::gen::run(&cfg, events)?;
            println!("wrote {n} recordings to {}", cfg.out.display());
        }
    }
    Ok(())
}

fn denoise(cfg: &RunConfig, input: &std::path::Path, filter: FilterKind) -> Result<()> {
    check_input(input)?;
    let s = commands::denoise::run(cfg, input, filter)?;
    println!("filtered {} frames into {}", s.frames, cfg.out.display());
    if filter == FilterKind::Imc {
        println!("mean BER against software NOMF: {:.3e}", s.mean_ber);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

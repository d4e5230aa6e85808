use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use micropolar_lab::check::run_check_suite;
use micropolar_lab::config::{parse_config, ExperimentConfig};
use micropolar_lab::experiment::{refit_rates, run_experiment, run_stationary, Report};
use micropolar_lab::Error;

const EXIT_RUNTIME: u8 = 1;
const EXIT_VALIDATION: u8 = 3;

/// Stationary outflow profiles and perturbation decay for the 1-D
/// compressible micropolar fluid.
#[derive(Parser)]
#[command(name = "micropolar-lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Flat `key = value` configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the boundary data and build the stationary profile.
    Stationary(Common),
    /// Full pipeline: profile, perturbed run, decay fit, report.
    Simulate(Common),
    /// Re-fit the decay series of a previous `simulate` run.
    Rates(Common),
    /// Run the randomized invariant suite.
    Check {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write `check.txt` into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(common: &Common) -> Result<ExperimentConfig, Error> {
    let text = std::fs::read_to_string(&common.config)
        .map_err(|e| Error::Validation(format!("cannot read {}: {e}", common.config.display())))?;
    let mut cfg = parse_config(&text)?;
    if let Some(out) = &common.out {
        cfg.output_dir = out.clone();
    }
    Ok(cfg)
}

fn finish(report: &Report) {
    print!("{}", report.render());
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Stationary(c) => finish(&run_stationary(&load(&c)?)?.report),
        Command::Simulate(c) => finish(&run_experiment(&load(&c)?)?.report),
        Command::Rates(c) => {
            let cfg = load(&c)?;
            let (_, rep) = refit_rates(&cfg, &cfg.output_dir)?;
            finish(&rep);
        }
        Command::Check { seed, out } => {
            let rep = run_check_suite(seed)?;
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir)?;
                rep.write(&dir.join("check.txt"))?;
            }
            finish(&rep);
            if !rep.all_pass() {
                return Ok(EXIT_RUNTIME);
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { EXIT_VALIDATION } else { EXIT_RUNTIME })
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qbattery::experiment::{self, CompareMode, RunOptions, ScenarioConfig};
use qbattery::{Error, Result};

#[derive(Parser)]
#[command(name = "qbattery", version, about = "Spin-chain quantum battery dynamics under GKSL noise")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a preset or a config file and write CSV files plus a manifest.
    Run {
        /// Preset name or path to a config file.
        target: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Shrink all-to-all cross rates to gamma/(N-1) when needed for CPTP.
        #[arg(long)]
        auto_cptp: bool,
        /// RK4 step.
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        tmax: Option<f64>,
    },
    /// List built-in presets.
    ListPresets,
    /// Compare one column of two output files.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        column: String,
        /// max_abs_diff or transient_dominance.
        #[arg(long)]
        mode: String,
        #[arg(long, num_args = 2, value_names = ["T0", "T1"], allow_negative_numbers = true)]
        window: Option<Vec<f64>>,
    },
    /// Check a config (schema and CPTP) without running it.
    Validate {
        /// Path to a config file or a preset name.
        config: String,
    },
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            target,
            out,
            auto_cptp,
            dt,
            tmax,
        } => {
            let mut config = ScenarioConfig::load(&target)?;
            if let Some(t) = tmax {
                config.t_max = t;
            }
            if dt.is_some() {
                config.dt_internal = dt;
            }
            let outcome = experiment::run_scenario(
                &config,
                &RunOptions {
                    out_dir: out,
                    auto_cptp,
                },
            )?;
            for r in &outcome.results {
                if let Some(a) = r.plan.auto_cptp {
                    eprintln!(
                        "auto-cptp: N = {} {}: |gamma_ij| {} -> {}",
                        r.plan.n_sites,
                        r.plan.topology.name(),
                        a.requested_modulus,
                        a.applied_modulus
                    );
                }
            }
            for path in &outcome.csv_paths {
                println!("{}", path.display());
            }
            println!("{}", outcome.manifest_path.display());
        }
        Command::ListPresets => {
            for (name, description) in experiment::list_presets() {
                println!("{name}\t{description}");
            }
        }
        Command::Compare {
            a,
            b,
            column,
            mode,
            window,
        } => {
            let mode: CompareMode = mode.parse()?;
            let window = window.map(|w| (w[0], w[1]));
            let report = experiment::compare_runs(&a, &b, &column, mode, window)?;
            let text = serde_json::to_string_pretty(&report).map_err(|e| Error::Io(e.into()))?;
            println!("{text}");
        }
        Command::Validate { config } => {
            let cfg = ScenarioConfig::load(&config)?;
            let plans = experiment::validate(&cfg, false)?;
            println!("{}: ok ({} runs)", cfg.name, plans.len());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

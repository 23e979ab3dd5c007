//! Argument parsing and dispatch for the `osaas` binary.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::commands::{
    cmd_crosstalk, cmd_diagnose, cmd_diagnose_report, cmd_recommend, cmd_sweep, cmd_validate,
};
use crate::error::{CliError, Result};
use crate::output::{
    crosstalk_csv, diagnose_csv, recommend_csv, sweep_csv, to_json, write_output, Format,
};
use crate::scenario_file::Overrides;

#[derive(Debug, Parser)]
#[command(
    name = "osaas",
    version,
    about = "Black-box probing and diagnosis of leased optical spectrum"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        }
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Scenario file (JSON).
    #[arg(long)]
    pub scenario: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Sweep step in GHz, overriding the file.
    #[arg(long)]
    pub step: Option<f64>,
    /// Readings per sweep point, overriding the file.
    #[arg(long)]
    pub trials: Option<u32>,
    /// Measurement-noise seed, overriding the file.
    #[arg(long)]
    pub seed_override: Option<u64>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: FormatArg,
}

impl RunArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            step: self.step,
            trials: self.trials,
            seed: self.seed_override,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep every probe across the slot and report normalized GSNR.
    Sweep(RunArgs),
    /// Sweep (or reuse a sweep report) and run every estimator.
    Diagnose {
        /// Scenario file to sweep. Exactly one of --scenario and --report.
        #[arg(long, conflicts_with = "report", required_unless_present = "report")]
        scenario: Option<PathBuf>,
        /// Sweep report written by `osaas sweep`.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Catalog file (JSON list of entries) replacing the scenario's.
        #[arg(long)]
        catalog: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, requires = "scenario")]
        step: Option<f64>,
        #[arg(long, requires = "scenario")]
        trials: Option<u32>,
        #[arg(long, requires = "scenario")]
        seed_override: Option<u64>,
        #[arg(long, value_enum, default_value = "json")]
        format: FormatArg,
    },
    /// Five-slot adjacent-channel crosstalk scan.
    Crosstalk(RunArgs),
    /// Throughput-maximizing carrier plan for the slot.
    Recommend {
        #[command(flatten)]
        run: RunArgs,
        /// Catalog file (JSON list of entries) replacing the scenario's.
        #[arg(long)]
        catalog: Option<PathBuf>,
    },
    /// Parse and validate a scenario file.
    Validate {
        #[arg(long)]
        scenario: PathBuf,
    },
}

fn emit(
    out: Option<&std::path::Path>,
    format: FormatArg,
    json: Result<Vec<u8>>,
    csv: impl FnOnce() -> Result<Vec<u8>>,
) -> Result<()> {
    let bytes = match Format::from(format) {
        Format::Json => json?,
        Format::Csv => csv()?,
    };
    write_output(out, &bytes)
}

/// Runs one parsed command.
pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Sweep(a) => {
            let r = cmd_sweep(&a.scenario, a.overrides())?;
            emit(a.out.as_deref(), a.format, to_json(&r), || sweep_csv(&r))
        }
        Command::Diagnose {
            scenario,
            report,
            catalog,
            out,
            step,
            trials,
            seed_override,
            format,
        } => {
            let r = match (scenario, report) {
                (Some(s), None) => cmd_diagnose(
                    &s,
                    Overrides {
                        step,
                        trials,
                        seed: seed_override,
                    },
                    catalog.as_deref(),
                )?,
                (None, Some(p)) => cmd_diagnose_report(&p, catalog.as_deref())?,
                _ => {
                    return Err(CliError::validation(
                        "give exactly one of --scenario and --report",
                    ))
                }
            };
            emit(out.as_deref(), format, to_json(&r), || diagnose_csv(&r))
        }
        Command::Crosstalk(a) => {
            let r = cmd_crosstalk(&a.scenario, a.overrides())?;
            emit(a.out.as_deref(), a.format, to_json(&r), || {
                crosstalk_csv(&r)
            })
        }
        Command::Recommend { run: a, catalog } => {
            let r = cmd_recommend(&a.scenario, a.overrides(), catalog.as_deref())?;
            emit(a.out.as_deref(), a.format, to_json(&r), || {
                recommend_csv(&r)
            })
        }
        Command::Validate { scenario } => {
            let f = cmd_validate(&scenario)?;
            println!(
                "{}: ok ({} media channel(s), {} probe(s), {} sweep points)",
                scenario.display(),
                f.scenario.media_channels.len(),
                f.probes.len(),
                f.sweep_plan().carriers().len()
            );
            Ok(())
        }
    }
}

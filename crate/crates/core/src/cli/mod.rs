//! Command-line front end: TOML run configurations, parameter sweeps with
//! CSV/JSON output, criterion reports and plain-text model files.
//!
//! Exit codes: 0 success, 2 configuration error, 3 solver failure,
//! 4 non-unique steady state with `--strict`.

mod config;
mod custom;
mod report;
mod sweep;

pub use config::{AxisSpec, Format, Grid, ModelKind, Observable, OutputSpec, RangeSpec, Scale, SweepConfig};
pub use custom::{model_to_text, parse_model_text, read_model_file, write_model_file};
pub use report::{report_criterion, CriterionSummary, Verdict};
pub use sweep::{compute_sweep, run_sweep, workers_from_env, Cell, SweepTable, WORKERS_ENV};

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::liouville::{fidelity, ness, purity_deficit, reduced_fidelity, spectrum, SpectrumResult};
use crate::models::TargetedModel;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_NON_UNIQUE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "zeno", version, about = "Zeno-limit targeting of pure states in Lindblad models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a parameter sweep and write CSV or JSON.
    Sweep {
        config: PathBuf,
        /// Exit with status 4 if any point has a non-unique steady state.
        #[arg(long)]
        strict: bool,
        /// Override `output.path`.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Targeting criterion, Γ_ch and singularity diagnostics.
    Criterion {
        config: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Steady state at one Γ, as JSON.
    Ness {
        config: PathBuf,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        strict: bool,
        /// Include the density matrix.
        #[arg(long)]
        rho: bool,
    },
    /// Liouvillian spectrum at one Γ, as JSON.
    Spectrum {
        config: PathBuf,
        #[arg(long)]
        gamma: f64,
    },
    /// Validate a model file and report its criterion.
    Ingest {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Write the configured model as a model file.
    Export { config: PathBuf, output: PathBuf },
}

impl Command {
    fn strict(&self) -> bool {
        matches!(self, Command::Sweep { strict: true, .. } | Command::Ness { strict: true, .. })
    }
}

/// What a successful command observed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub non_unique: bool,
}

#[derive(Serialize)]
struct NessSummary<'a> {
    model: &'a str,
    gamma: f64,
    residual: f64,
    nullity: usize,
    unique: bool,
    purity_deficit: f64,
    fidelity: f64,
    reduced_fidelity: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    rho: Option<Vec<Vec<[f64; 2]>>>,
}

#[derive(Serialize)]
struct SpectrumSummary<'a> {
    model: &'a str,
    gamma: f64,
    nullity: usize,
    #[serde(flatten)]
    spectrum: &'a SpectrumResult,
}

fn load_model(path: &std::path::Path) -> Result<TargetedModel> {
    SweepConfig::load(path)?.build_model(None)
}

fn at_gamma(tm: &TargetedModel, gamma: f64) -> Result<TargetedModel> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::config("--gamma", format!("expected a finite value > 0, got {gamma}")));
    }
    tm.with_gamma(gamma)
}

fn json_line(out: &mut dyn Write, v: &impl Serialize) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, v).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    writeln!(out)?;
    Ok(())
}

fn print_report(out: &mut dyn Write, tm: &TargetedModel, json: bool) -> Result<()> {
    let r = report_criterion(tm)?;
    if json {
        json_line(out, &r)
    } else {
        write!(out, "{}", r.render())?;
        Ok(())
    }
}

/// Runs a parsed command, writing its report to `out`.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<Outcome> {
    match &cli.command {
        Command::Sweep { config, output, .. } => {
            let mut cfg = SweepConfig::load(config)?;
            if let (Some(p), Some(o)) = (output, cfg.output.as_mut()) {
                o.path = p.clone();
            }
            let table = run_sweep(&cfg, workers_from_env()?)?;
            let path = cfg.output.as_ref().map(|o| o.path.display().to_string()).unwrap_or_default();
            writeln!(
                out,
                "{} records written to {path} ({} failed, {} non-unique)",
                table.rows.len(),
                table.failed_count(),
                table.non_unique_count()
            )?;
            Ok(Outcome {
                non_unique: table.non_unique_count() > 0,
            })
        }
        Command::Criterion { config, json } => {
            print_report(out, &load_model(config)?, *json)?;
            Ok(Outcome::default())
        }
        Command::Ingest { file, json } => {
            print_report(out, &read_model_file(file)?, *json)?;
            Ok(Outcome::default())
        }
        Command::Ness { config, gamma, rho, .. } => {
            let tm = at_gamma(&load_model(config)?, *gamma)?;
            let r = ness(&tm.model)?;
            let summary = NessSummary {
                model: &tm.name,
                gamma: *gamma,
                residual: r.residual,
                nullity: r.nullity,
                unique: r.unique,
                purity_deficit: purity_deficit(&r.rho),
                fidelity: fidelity(&r.rho, &tm.full_target)?,
                reduced_fidelity: reduced_fidelity(&r.rho, &tm.target, tm.model.layout())?,
                rho: rho.then(|| {
                    (0..r.rho.rows())
                        .map(|i| r.rho.row(i).iter().map(|z| [z.re, z.im]).collect())
                        .collect()
                }),
            };
            json_line(out, &summary)?;
            Ok(Outcome { non_unique: !r.unique })
        }
        Command::Spectrum { config, gamma } => {
            let tm = at_gamma(&load_model(config)?, *gamma)?;
            let s = spectrum(&tm.model)?;
            json_line(
                out,
                &SpectrumSummary {
                    model: &tm.name,
                    gamma: *gamma,
                    nullity: s.nullity(),
                    spectrum: &s,
                },
            )?;
            Ok(Outcome::default())
        }
        Command::Export { config, output } => {
            let tm = load_model(config)?;
            write_model_file(&tm, output)?;
            writeln!(out, "wrote {}", output.display())?;
            Ok(Outcome::default())
        }
    }
}

pub fn exit_code(result: &Result<Outcome>, strict: bool) -> i32 {
    match result {
        Ok(o) if strict && o.non_unique => EXIT_NON_UNIQUE,
        Ok(_) => EXIT_OK,
        Err(Error::Config { .. }) => EXIT_CONFIG,
        Err(_) => EXIT_SOLVER,
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = write!(err, "{e}");
            return code;
        }
    };
    let result = execute(&cli, out);
    if let Err(e) = &result {
        let _ = writeln!(err, "error: {e}");
    }
    if let Ok(o) = &result {
        if o.non_unique {
            let _ = writeln!(err, "warning: non-unique steady state encountered");
        }
    }
    exit_code(&result, cli.command.strict())
}

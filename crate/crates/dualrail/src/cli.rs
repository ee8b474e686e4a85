//! Argument parsing and output routing for the `dualrail` binary.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::commands::execute;
use crate::config::{Command, Params, PathSel, RunConfig};
use crate::table::config_from_csv;
use crate::{AppError, AppResult};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "DUALRAIL_OUT_DIR";

#[derive(Parser, Debug)]
#[command(
    name = "dualrail",
    version,
    about = "Dual-rail boson circuit simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Subcommand, Debug)]
pub enum Sub {
    /// Heralded-source statistics against N and chi.
    SourceStats(Sweep),
    /// Mismatched c-not expectation over (alpha, xi).
    CnotSweep(Sweep),
    /// Evaluate a circuit file.
    Run {
        circuit: PathBuf,
        #[command(flatten)]
        sweep: Sweep,
    },
    /// Mismatch factor of displaced wavepackets.
    Xi {
        /// Sampled amplitude (`k re im` lines), displaced by each --dx.
        #[arg(long, requires = "reference")]
        amplitude: Option<PathBuf>,
        /// Sampled reference amplitude at the origin.
        #[arg(long, requires = "amplitude")]
        reference: Option<PathBuf>,
        #[command(flatten)]
        sweep: Sweep,
    },
    /// Re-run the config embedded in a previous CSV output.
    Replay {
        csv: PathBuf,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Args, Debug, Clone)]
pub struct Output {
    /// Output CSV file; stdout when neither this nor the output directory is set.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Directory receiving `<command>.csv` when --out is absent.
    #[arg(long, env = OUT_DIR_ENV)]
    pub out_dir: Option<PathBuf>,
    /// Worker threads; 0 picks the number of cores.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Args, Debug, Clone)]
pub struct Sweep {
    #[arg(long, value_delimiter = ',')]
    pub chi: Vec<f64>,
    /// Source counts; a single value is the upper end of a log grid for source-stats.
    #[arg(long, value_delimiter = ',')]
    pub n_sources: Vec<u64>,
    #[arg(long, value_delimiter = ',')]
    pub alpha: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub xi: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub dx: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub sigma: Vec<f64>,
    #[arg(long)]
    pub truncation: Option<usize>,
    /// Truncation of heralded-source modes.
    #[arg(long)]
    pub source_truncation: Option<usize>,
    #[arg(long, value_enum)]
    pub path: Option<PathSel>,
    /// Log-grid density for source-stats.
    #[arg(long)]
    pub points_per_decade: Option<u32>,
    /// Append this many random (alpha, xi) points to a cnot-sweep.
    #[arg(long, default_value_t = 0)]
    pub random: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

impl Sweep {
    fn params(&self) -> Params {
        Params {
            chi: self.chi.clone(),
            n_sources: self.n_sources.clone(),
            alpha: self.alpha.clone(),
            xi: self.xi.clone(),
            dx: self.dx.clone(),
            sigma: self.sigma.clone(),
            truncation: self.truncation,
            source_truncation: self.source_truncation,
            path: self.path,
            input: None,
            reference: None,
            random_points: self.random,
            seed: self.seed,
            points_per_decade: self.points_per_decade,
        }
    }
}

fn destination(output: &Output, command: Command) -> Option<PathBuf> {
    match (&output.out, &output.out_dir) {
        (Some(p), _) => Some(p.clone()),
        (None, Some(dir)) => Some(dir.join(format!("{}.csv", command.name()))),
        (None, None) => None,
    }
}

fn write_output(text: &str, dest: Option<&Path>) -> AppResult<()> {
    match dest {
        Some(path) => std::fs::write(path, text).map_err(|e| AppError::io(path, e)),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| AppError::io(Path::new("<stdout>"), e)),
    }
}

fn resolve(sub: Sub) -> AppResult<(RunConfig, Output)> {
    Ok(match sub {
        Sub::SourceStats(s) => (
            RunConfig::resolve(Command::SourceStats, s.params())?,
            s.output,
        ),
        Sub::CnotSweep(s) => (
            RunConfig::resolve(Command::CnotSweep, s.params())?,
            s.output,
        ),
        Sub::Run { circuit, sweep } => {
            let mut p = sweep.params();
            p.input = Some(circuit);
            (RunConfig::resolve(Command::Run, p)?, sweep.output)
        }
        Sub::Xi {
            amplitude,
            reference,
            sweep,
        } => {
            let mut p = sweep.params();
            p.input = amplitude;
            p.reference = reference;
            (RunConfig::resolve(Command::Xi, p)?, sweep.output)
        }
        Sub::Replay { csv, output } => {
            let text = std::fs::read_to_string(&csv).map_err(|e| AppError::io(&csv, e))?;
            (config_from_csv(&text, &csv.display().to_string())?, output)
        }
    })
}

/// Runs a parsed command line and returns the CSV text.
pub fn run_cli(cli: Cli) -> AppResult<(String, Option<PathBuf>)> {
    let (mut config, output) = resolve(cli.command)?;
    let dest = destination(&output, config.command);
    config.out = dest.clone();
    let table = execute(&config, output.workers)?;
    Ok((table.render(&config)?, dest))
}

/// Process entry point; returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = run_cli(cli).and_then(|(text, dest)| write_output(&text, dest.as_deref()));
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

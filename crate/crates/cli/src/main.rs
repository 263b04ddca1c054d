//! `fractform`: command-line driver for fractal-boundary form experiments.

mod config;
mod error;
mod experiment;
mod report;
mod sweep;

use std::fs::{File, OpenOptions};
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use fractform_core::record::{read_records, write_record};
use fractform_core::{geomfield, linalg, simsys};

use config::Common;
use error::{CliError, CliResult};
use experiment::{Domain, Run};

/// Environment variable holding the worker-thread count.
const THREADS_ENV: &str = "FRACTFORM_THREADS";

#[derive(Debug, Parser)]
#[command(name = "fractform", version, about = "Degenerate elliptic forms on fractal-boundary domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a boundary realization and characterize its distance field.
    Fractal {
        #[command(flatten)]
        common: Common,
        /// Write the geometry (text format).
        #[arg(long)]
        geometry: Option<PathBuf>,
        /// Write the distance field (`.csv` for CSV, anything else for binary).
        #[arg(long)]
        field: Option<PathBuf>,
    },
    /// Similarity dimension s and critical exponent δ_c.
    Dimension {
        #[command(flatten)]
        common: Common,
    },
    /// Relaxed capacity of the boundary and the η_{r,n} upper bound.
    Capacity {
        #[command(flatten)]
        common: Common,
    },
    /// Local weighted Hardy quotient.
    Hardy {
        #[command(flatten)]
        common: Common,
    },
    /// Collar and truncated singular integrals of d^{δ−2}.
    Collar {
        #[command(flatten)]
        common: Common,
    },
    /// Absorption probability of the random walk generated by the form.
    Walk {
        #[command(flatten)]
        common: Common,
    },
    /// Capacity-trend verdicts over a (λ, δ) grid.
    Sweep {
        #[command(flatten)]
        common: Common,
    },
    /// CSV table and phase-diagram SVG from a record stream.
    Report {
        /// Input record stream.
        #[arg(long = "in")]
        input: PathBuf,
        /// SVG output.
        #[arg(long)]
        out: PathBuf,
        /// CSV output (default: the SVG path with a `.csv` extension).
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return;
        }
        Err(e) => fail(CliError::config(e.to_string().trim().to_string())),
    };
    if let Err(e) = configure_threads().and_then(|()| run(cli.command)) {
        fail(e);
    }
}

fn fail(e: CliError) -> ! {
    eprintln!("{}", e.to_json());
    std::process::exit(e.code);
}

fn configure_threads() -> CliResult<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::config(format!("{THREADS_ENV}={value:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::config(format!("thread pool: {e}")))
}

fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Dimension { common } => {
            let cfg = common.resolve()?;
            emit(&common, experiment::dimension(&cfg)?)
        }
        Command::Fractal { common, geometry, field } => {
            let cfg = common.resolve()?;
            let domain = Domain::from_config(&cfg)?;
            if let (Some(path), Some(geom)) = (&geometry, &domain.geometry) {
                simsys::export::write_geometry(geom, BufWriter::new(File::create(path)?))?;
            }
            if let Some(path) = &field {
                let sink = BufWriter::new(File::create(path)?);
                if path.extension().is_some_and(|e| e == "csv") {
                    geomfield::export::write_csv(&domain.df, sink)?;
                } else {
                    geomfield::export::write_binary(&domain.df, sink)?;
                }
            }
            emit(&common, experiment::fractal(&cfg, &domain)?)
        }
        Command::Capacity { common } => {
            let cfg = common.resolve()?;
            let domain = Domain::from_config(&cfg)?;
            emit(&common, experiment::capacity(&cfg, &domain, common.trace.is_some())?)
        }
        Command::Hardy { common } => single(&common, experiment::hardy),
        Command::Collar { common } => single(&common, experiment::collar),
        Command::Walk { common } => single(&common, experiment::walk),
        Command::Sweep { common } => {
            let cfg = common.resolve()?;
            let out = common
                .out
                .clone()
                .ok_or_else(|| CliError::config("sweep needs --out for its record stream"))?;
            let summary = sweep::run(&cfg, &out)?;
            println!("records_written = {}", summary.written);
            println!("records_skipped = {}", summary.skipped);
            Ok(())
        }
        Command::Report { input, out, csv } => {
            let records = read_records(BufReader::new(File::open(&input)?))?;
            let svg = report::phase_svg(&records)?;
            std::fs::write(&out, svg)?;
            let csv = csv.unwrap_or_else(|| out.with_extension("csv"));
            std::fs::write(&csv, report::csv_table(&records))?;
            println!("records = {}", records.len());
            println!("svg = {}", out.display());
            println!("csv = {}", csv.display());
            Ok(())
        }
    }
}

fn single(common: &Common, op: fn(&config::Config, &Domain) -> CliResult<Run>) -> CliResult<()> {
    let cfg = common.resolve()?;
    let domain = Domain::from_config(&cfg)?;
    emit(common, op(&cfg, &domain)?)
}

/// Prints `key = value` lines, appends the record, writes the trace.
fn emit(common: &Common, run: Run) -> CliResult<()> {
    let r = &run.record;
    let stdout = std::io::stdout();
    let mut w = stdout.lock();
    writeln!(w, "id = {}", r.id)?;
    writeln!(w, "s = {:.10}", r.s)?;
    writeln!(w, "delta_c = {:.10}", r.delta_c)?;
    for (k, v) in &r.outputs {
        writeln!(w, "{k} = {v}")?;
    }
    if let Some(path) = &common.out {
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        write_record(r, file)?;
    }
    if let Some(path) = &common.trace {
        linalg::write_trace(&run.trace, BufWriter::new(File::create(path)?))?;
    }
    Ok(())
}

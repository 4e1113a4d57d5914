//! `morsim` command-line front end.
//!
//! Exit codes: 0 ok, 1 failed anchor check, 2 config or I/O error,
//! 3 numerical kernel error, 4 no root found.

mod emit;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use morsim::config::Config;
use morsim::rotation::solve_condition;
use morsim::scan::{figure_driver, row_at, sweep, FigureId, ScanVariable, SweepSpec};
use morsim::units::scaled_from_lab;
use morsim::Error;

#[derive(Parser)]
#[command(name = "morsim", version, about = "Coherent control of magneto-optical rotation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Probe-detuning spectrum.
    Spectrum(RunArgs),
    /// Sweep over the configured scan variable (delta, zeta or G1).
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        variable: Option<ScanVariable>,
        #[arg(long, allow_hyphen_values = true)]
        lo: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        hi: Option<f64>,
    },
    /// Roots of the maximal-rotation condition along the scan variable.
    Solve {
        #[command(flatten)]
        run: RunArgs,
        /// Order of the (2n+1) pi condition.
        #[arg(long, default_value_t = 0)]
        n: u32,
        #[arg(long, allow_hyphen_values = true)]
        lo: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        hi: Option<f64>,
        /// Uniform samples used to bracket sign changes.
        #[arg(long, default_value_t = 601)]
        samples: usize,
    },
    /// Laboratory to dimensionless conversion report.
    Units {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Recompute a figure and compare its published anchors.
    Check {
        /// Figure id, or `all`.
        figure: String,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    preset: Option<FigureId>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    two_photon: bool,
    #[arg(long)]
    no_control: bool,
    #[arg(long)]
    no_field: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

enum Failure {
    Anchors,
    Config(String),
    Kernel(Error),
    NoRoot(Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Anchors => 1,
            Failure::Config(_) => 2,
            Failure::Kernel(_) => 3,
            Failure::NoRoot(_) => 4,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let mut inner = &e;
        while let Error::AtScanValue { source, .. } = inner {
            inner = source;
        }
        match inner {
            Error::Config(_) | Error::Validation(_) | Error::Sweep(_) => Failure::Config(e.to_string()),
            Error::NoRoot { .. } => Failure::NoRoot(e),
            _ => Failure::Kernel(e),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Config(format!("output: {e}"))
    }
}

type Outcome = std::result::Result<(), Failure>;

fn open_output(path: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load_config(path: Option<&Path>) -> std::result::Result<Config, Failure> {
    match path {
        Some(p) => Config::load(p).map_err(Failure::from),
        None => Ok(Config::default()),
    }
}

fn resolve(run: &RunArgs) -> std::result::Result<SweepSpec, Failure> {
    let config = load_config(run.config.as_deref())?;
    let (mut spec, notes) = config.resolve(run.preset)?;
    for note in notes {
        eprintln!("note: {note}");
    }
    if let Some(points) = run.points {
        spec.points = points;
    }
    spec.flags.two_photon |= run.two_photon;
    spec.flags.control &= !run.no_control;
    spec.flags.field &= !run.no_field;
    Ok(spec)
}

fn override_range(spec: &mut SweepSpec, variable: Option<ScanVariable>, lo: Option<f64>, hi: Option<f64>) {
    if let Some(v) = variable {
        spec.variable = v;
    }
    spec.lo = lo.unwrap_or(spec.lo);
    spec.hi = hi.unwrap_or(spec.hi);
}

fn run_table(run: &RunArgs, spec: &SweepSpec) -> Outcome {
    spec.check().map_err(|e| Failure::Config(e.to_string()))?;
    let rows = sweep(spec)?;
    let mut out = open_output(&run.output)?;
    match run.format {
        Format::Csv => emit::rows_csv(&mut out, &rows)?,
        Format::Json => emit::rows_json(&mut out, &rows)?,
    }
    out.flush()?;
    Ok(())
}

fn spectrum(run: &RunArgs) -> Outcome {
    let spec = resolve(run)?;
    if spec.variable != ScanVariable::Delta {
        return Err(Failure::Config(format!(
            "spectrum scans delta but the configuration scans {}; use `sweep`",
            spec.variable.name()
        )));
    }
    run_table(run, &spec)
}

fn solve(run: &RunArgs, n: u32, lo: Option<f64>, hi: Option<f64>, samples: usize) -> Outcome {
    let mut spec = resolve(run)?;
    override_range(&mut spec, None, lo, hi);
    let alpha_l = spec.params.env.alpha_l;
    let roots = solve_condition(|x| row_at(&spec, x).map(|r| r.pair_on()), spec.lo, spec.hi, samples, alpha_l, n)?;
    let mut out = open_output(&run.output)?;
    match run.format {
        Format::Csv => emit::roots_csv(&mut out, spec.variable.name(), &roots)?,
        Format::Json => emit::roots_json(&mut out, spec.variable.name(), n, &roots)?,
    }
    out.flush()?;
    Ok(())
}

fn units(config: Option<&Path>, format: Format, output: &Option<PathBuf>) -> Outcome {
    let lab = load_config(config)?.lab_units()?;
    // any rejection of the laboratory values is a units problem
    let scaled = scaled_from_lab(&lab).map_err(|e| Failure::Config(e.to_string()))?;
    let mut out = open_output(output)?;
    match format {
        Format::Csv => emit::units_text(&mut out, &scaled)?,
        Format::Json => emit::units_json(&mut out, &scaled)?,
    }
    out.flush()?;
    Ok(())
}

fn check(figure: &str, format: Format, output: &Option<PathBuf>) -> Outcome {
    let ids: Vec<FigureId> = if figure.eq_ignore_ascii_case("all") {
        FigureId::ALL.to_vec()
    } else {
        vec![figure.parse()?]
    };
    let mut out = open_output(output)?;
    let mut pass = true;
    let mut reports = Vec::new();
    for id in ids {
        let report = figure_driver(id)?;
        pass &= report.all_pass();
        match format {
            Format::Csv => emit::report_text(&mut out, &report)?,
            Format::Json => reports.push(emit::report_json(&report)),
        }
    }
    if format == Format::Json {
        serde_json::to_writer_pretty(&mut out, &reports).map_err(io::Error::from)?;
        writeln!(out)?;
    }
    out.flush()?;
    if pass {
        Ok(())
    } else {
        Err(Failure::Anchors)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Spectrum(run) => spectrum(run),
        Command::Sweep { run, variable, lo, hi } => resolve(run).and_then(|mut spec| {
            override_range(&mut spec, *variable, *lo, *hi);
            run_table(run, &spec)
        }),
        Command::Solve { run, n, lo, hi, samples } => solve(run, *n, *lo, *hi, *samples),
        Command::Units { config, format, output } => units(config.as_deref(), *format, output),
        Command::Check { figure, format, output } => check(figure, *format, output),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Anchors => eprintln!("error: one or more anchors failed"),
                Failure::Config(m) => eprintln!("error: {m}"),
                Failure::Kernel(e) | Failure::NoRoot(e) => eprintln!("error: {e}"),
            }
            ExitCode::from(failure.code())
        }
    }
}

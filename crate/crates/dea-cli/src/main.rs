//! `dea` — efficiency and congestion tables from a CSV of production data.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dea::directional::{Method, StepConfig};
use dea::io::{self, OutputFormat, RunConfig};
use dea::{Dataset, DeaError, Real};

#[derive(Parser)]
#[command(
    name = "dea",
    version,
    about = "Production-frontier efficiency and congestion analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-unit efficiency table: expansion factor, technical efficiency,
    /// congestion degree.
    Efficiency {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Efficiency table plus the No/Weak/Strong congestion classification.
    Congestion {
        #[command(flatten)]
        common: CommonArgs,
        /// Add the weak-disposability measure columns.
        #[arg(long)]
        with_fgl: bool,
        /// Add per-input congestion amount columns.
        #[arg(long)]
        with_ctt: bool,
    },
    /// Directional congestion table for selected units over a direction grid.
    Directional {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        directional: DirectionalArgs,
        /// Unit selector: a label, a 1-based index, or `all`.
        #[arg(long)]
        dmu: String,
    },
    /// Directional congestion sweep over every unit (same table as
    /// `directional --dmu all`).
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        directional: DirectionalArgs,
        /// Unit selector: a label, a 1-based index, or `all`.
        #[arg(long, default_value = "all")]
        dmu: String,
    },
}

#[derive(Args)]
struct CommonArgs {
    /// Dataset CSV: one label column, `in:`-prefixed inputs, `out:`-prefixed
    /// outputs.
    #[arg(long)]
    data: PathBuf,
    /// Output format.
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    /// Classification tolerance for "equals 1" / "less than 0" decisions.
    #[arg(long)]
    tol: Option<f64>,
    /// Print full-precision numbers instead of table rounding.
    #[arg(long)]
    full_precision: bool,
}

#[derive(Args)]
struct DirectionalArgs {
    /// Direction grid: `diag`, or semicolon-separated
    /// `omega=a,b|delta=c,d,...` entries, or `@file` with one entry per line.
    #[arg(long, default_value = "diag")]
    grid: String,
    /// Estimation route.
    #[arg(long, value_enum, default_value = "both")]
    method: MethodArg,
    /// Initial finite-difference step.
    #[arg(long)]
    t0: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Tsv,
    Md,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Fdm,
    Ulbm,
    Both,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Tsv => OutputFormat::Tsv,
            FormatArg::Md => OutputFormat::Markdown,
        }
    }
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Fdm => Method::Fdm,
            MethodArg::Ulbm => Method::Ulbm,
            MethodArg::Both => Method::Both,
        }
    }
}

const EXIT_INPUT: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("DEA_LOG", "warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            if let Some(mut source) = std::error::Error::source(&err) {
                loop {
                    eprintln!("  caused by: {source}");
                    match std::error::Error::source(source) {
                        Some(next) => source = next,
                        None => break,
                    }
                }
            }
            if err.is_input_error() {
                ExitCode::from(EXIT_INPUT)
            } else {
                ExitCode::from(EXIT_NUMERICAL)
            }
        }
    }
}

fn build_config(
    common: &CommonArgs,
    directional: Option<&DirectionalArgs>,
) -> Result<RunConfig<Real>, DeaError> {
    let mut cfg = RunConfig::<Real> {
        format: common.format.into(),
        full_precision: common.full_precision,
        ..RunConfig::default()
    };
    if let Some(tol) = common.tol {
        if !(tol > 0.0) {
            return Err(DeaError::InvalidInput(format!(
                "tolerance must be strictly positive, got {tol}"
            )));
        }
        cfg.tolerances.classification = tol;
    }
    if let Some(args) = directional {
        cfg.method = args.method.into();
        if let Some(t0) = args.t0 {
            if !(t0 > 0.0) {
                return Err(DeaError::InvalidInput(format!(
                    "initial step must be strictly positive, got {t0}"
                )));
            }
            cfg.steps = StepConfig {
                t_initial: t0,
                ..StepConfig::default()
            };
        }
    }
    Ok(cfg)
}

fn select_units(d: &Dataset<Real>, selector: &str) -> Result<Vec<usize>, DeaError> {
    if selector.eq_ignore_ascii_case("all") {
        return Ok((0..d.len()).collect());
    }
    if let Some(j) = d.find(selector) {
        return Ok(vec![j]);
    }
    if let Ok(index) = selector.parse::<usize>() {
        if index >= 1 && index <= d.len() {
            return Ok(vec![index - 1]);
        }
        return Err(DeaError::InvalidInput(format!(
            "unit index {index} out of range 1..={}",
            d.len()
        )));
    }
    Err(DeaError::InvalidInput(format!(
        "no unit labelled {selector:?} (use a label, a 1-based index, or 'all')"
    )))
}

fn read_grid_spec(spec: &str) -> Result<String, DeaError> {
    if let Some(path) = spec.strip_prefix('@') {
        let text = std::fs::read_to_string(path)
            .map_err(|e| DeaError::InvalidInput(format!("cannot read grid file {path}: {e}")))?;
        Ok(text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect::<Vec<_>>()
            .join(";"))
    } else {
        Ok(spec.to_string())
    }
}

fn run(cli: Cli) -> Result<ExitCode, DeaError> {
    match cli.command {
        Command::Efficiency { common } => {
            let d: Dataset<Real> = io::load_dataset(&common.data)?;
            let cfg = build_config(&common, None)?;
            let table = io::cmd_efficiency(&d, &cfg)?;
            print!("{}", table.render(cfg.format));
            Ok(ExitCode::SUCCESS)
        }
        Command::Congestion {
            common,
            with_fgl,
            with_ctt,
        } => {
            let d: Dataset<Real> = io::load_dataset(&common.data)?;
            let mut cfg = build_config(&common, None)?;
            cfg.with_fgl = with_fgl;
            cfg.with_ctt = with_ctt;
            let table = io::cmd_congestion(&d, &cfg)?;
            print!("{}", table.render(cfg.format));
            Ok(ExitCode::SUCCESS)
        }
        Command::Directional {
            common,
            directional,
            dmu,
        }
        | Command::Sweep {
            common,
            directional,
            dmu,
        } => {
            let d: Dataset<Real> = io::load_dataset(&common.data)?;
            let cfg = build_config(&common, Some(&directional))?;
            let units = select_units(&d, &dmu)?;
            let spec = read_grid_spec(&directional.grid)?;
            let grid = io::parse_direction_grid(&spec, d.num_inputs(), d.num_outputs())?;
            let (table, errors) = io::cmd_directional(&d, &units, &grid, &cfg)?;
            print!("{}", table.render(cfg.format));
            if errors.is_empty() {
                Ok(ExitCode::SUCCESS)
            } else if errors.iter().all(DeaError::is_input_error) {
                Ok(ExitCode::from(EXIT_INPUT))
            } else {
                Ok(ExitCode::from(EXIT_NUMERICAL))
            }
        }
    }
}

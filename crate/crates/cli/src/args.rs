use std::ffi::OsString;
use std::path::PathBuf;

use calper_core::dtw::DEFAULT_STRETCH;
use calper_core::{
    derived_pattern_bounds, verify_bounds_by_enumeration, HierarchySpec, Metric, PeriodLevel, Rational,
    Resolution,
};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use num_rational::Ratio;
use serde::Serialize;

use crate::config::{self, DtwSettings, Mode, OutputFormat, RunConfig};
use crate::{run, CliError};

#[derive(Debug, Parser)]
#[command(
    name = "calper",
    version,
    about = "Mine yearly, monthly, daily and hourly periodicities of interval-based patterns",
    args_conflicts_with_subcommands = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Command>,
    #[command(flatten)]
    pub mine: MineArgs,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bounds on the coarse-level periodicities induced by a fine-level pattern.
    Bounds(BoundsArgs),
}

#[derive(Debug, Args)]
pub struct MineArgs {
    #[arg(long, value_enum, default_value_t = Mode::Intervals)]
    pub mode: Mode,
    /// Comma-separated levels to mine.
    #[arg(long, value_delimiter = ',', default_value = "yearly", value_parser = config::parse_level)]
    pub level: Vec<PeriodLevel>,
    /// Dataset resolution; detected from the timestamps when omitted.
    #[arg(long, value_parser = config::parse_resolution)]
    pub resolution: Option<Resolution>,
    /// Smallest peak certainty to report, as `a/b`, a decimal or a percentage.
    #[arg(long, default_value = "0", value_parser = config::parse_fraction)]
    pub min_certainty: Ratio<u64>,
    /// Interval CSV (`start,end`) or series CSV (`date,value`).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Shape template, one number per line.
    #[arg(long)]
    pub template: Option<PathBuf>,
    /// Warping window half-width.
    #[arg(long)]
    pub dtw_window: Option<usize>,
    /// Largest normalized warping distance counted as a match.
    #[arg(long)]
    pub dtw_threshold: Option<f64>,
    /// Candidate windows span template length / stretch to length * stretch.
    #[arg(long, default_value_t = DEFAULT_STRETCH)]
    pub stretch: f64,
    #[arg(long, default_value = "absolute", value_parser = config::parse_metric)]
    pub dtw_metric: Metric,
    /// Z-normalize the template and every candidate window.
    #[arg(long)]
    pub znormalize: bool,
    /// Report file; standard output when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    /// Write extracted matches as an interval CSV.
    #[arg(long)]
    pub matches_out: Option<PathBuf>,
    /// Write change records, knots and hills as JSON.
    #[arg(long)]
    pub debug_records: Option<PathBuf>,
}

impl MineArgs {
    pub fn into_config(self) -> Result<RunConfig, CliError> {
        let input = self.input.ok_or_else(|| CliError::Usage("--input is required".into()))?;
        Ok(RunConfig {
            mode: self.mode,
            levels: self.level,
            resolution: self.resolution,
            min_certainty: self.min_certainty,
            input,
            template: self.template,
            dtw: DtwSettings {
                window: self.dtw_window,
                threshold: self.dtw_threshold,
                stretch: self.stretch,
                metric: self.dtw_metric,
                znormalize: self.znormalize,
            },
            output: self.output,
            format: self.format,
            matches_out: self.matches_out,
            debug_records: self.debug_records,
        })
    }
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Fine-level combinations per coarse-level value (12 for months in a year).
    #[arg(long)]
    pub p: u64,
    /// Fine-level periodicity, as `a/b` or a decimal.
    #[arg(long, value_parser = config::parse_fraction)]
    pub f: Ratio<u64>,
    /// Coarse-level periods in the lifespan.
    #[arg(long)]
    pub mj: u64,
    /// Comma-separated coarse-level occurrence counts to check against the bounds.
    #[arg(long, value_delimiter = ',')]
    pub counts: Option<Vec<u64>>,
}

#[derive(Serialize)]
struct BoundsOutput {
    p: u64,
    f: String,
    m_j: u64,
    m_i: u64,
    min_periodicity: String,
    avg_periodicity: String,
    count: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    check: Option<CheckOutput>,
}

#[derive(Serialize)]
struct CheckOutput {
    counts: Vec<u64>,
    f: String,
    min_ratio: String,
    argmin: usize,
    mean_ratio: String,
    holds: bool,
    tight: bool,
}

fn to_rational(f: Ratio<u64>) -> Result<Rational, CliError> {
    let conv = |x: u64| i64::try_from(x).map_err(|_| CliError::Usage("--f is too large".into()));
    Ok(Rational::new(conv(*f.numer())?, conv(*f.denom())?))
}

fn bounds(args: BoundsArgs) -> Result<String, CliError> {
    let usage = |e: calper_core::HierarchyError| CliError::Usage(e.to_string());
    let spec = HierarchySpec::new(args.p, to_rational(args.f)?, args.mj).map_err(usage)?;
    let b = derived_pattern_bounds(&spec).map_err(usage)?;
    let check = match args.counts {
        Some(counts) => {
            let c = verify_bounds_by_enumeration(args.p, args.mj, &counts).map_err(usage)?;
            Some(CheckOutput {
                counts,
                f: c.f.to_string(),
                min_ratio: c.min_ratio.to_string(),
                argmin: c.argmin,
                mean_ratio: c.mean_ratio.to_string(),
                holds: c.holds,
                tight: c.tight,
            })
        }
        None => None,
    };
    let out = BoundsOutput {
        p: spec.p,
        f: spec.f.to_string(),
        m_j: spec.m_j,
        m_i: spec.m_i(),
        min_periodicity: b.min_periodicity.to_string(),
        avg_periodicity: b.avg_periodicity.to_string(),
        count: b.count,
        check,
    };
    let mut json = serde_json::to_string_pretty(&out).expect("bounds serialize");
    json.push('\n');
    Ok(json)
}

/// Parses `args` and runs the requested command, returning the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    let result = match cli.command {
        Some(Command::Bounds(b)) => bounds(b).map(|json| print!("{json}")),
        None => cli.mine.into_config().and_then(|cfg| run(&cfg).map(|_| ())),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("calper: {e}");
            e.exit_code()
        }
    }
}

use std::path::PathBuf;

use calper_core::dtw::DEFAULT_STRETCH;
use calper_core::{Metric, PeriodLevel, Resolution, WarpConfig};
use num_rational::Ratio;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    /// Occurrence intervals given directly.
    Intervals,
    /// Occurrences extracted from a time series by template matching.
    Series,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Template matching parameters for series mode.
#[derive(Clone, Debug, PartialEq)]
pub struct DtwSettings {
    pub window: Option<usize>,
    pub threshold: Option<f64>,
    pub stretch: f64,
    pub metric: Metric,
    pub znormalize: bool,
}

impl Default for DtwSettings {
    fn default() -> Self {
        Self {
            window: None,
            threshold: None,
            stretch: DEFAULT_STRETCH,
            metric: Metric::Absolute,
            znormalize: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    /// Levels to mine, each reported separately.
    pub levels: Vec<PeriodLevel>,
    /// Overrides the resolution detected from the input.
    pub resolution: Option<Resolution>,
    pub min_certainty: Ratio<u64>,
    pub input: PathBuf,
    pub template: Option<PathBuf>,
    pub dtw: DtwSettings,
    /// Report destination; standard output when absent.
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    /// Interval CSV of the extracted matches (series mode).
    pub matches_out: Option<PathBuf>,
    /// JSON dump of change records, knots and hills per level.
    pub debug_records: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(mode: Mode, input: impl Into<PathBuf>) -> Self {
        Self {
            mode,
            levels: vec![PeriodLevel::Yearly],
            resolution: None,
            min_certainty: Ratio::from_integer(0),
            input: input.into(),
            template: None,
            dtw: DtwSettings::default(),
            output: None,
            format: OutputFormat::Json,
            matches_out: None,
            debug_records: None,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let usage = |msg: &str| Err(CliError::Usage(msg.to_owned()));
        if self.levels.is_empty() {
            return usage("at least one --level is required");
        }
        for (i, level) in self.levels.iter().enumerate() {
            if self.levels[..i].contains(level) {
                return Err(CliError::Usage(format!("level {level} given twice")));
            }
        }
        if self.min_certainty > Ratio::from_integer(1) {
            return usage("--min-certainty must lie in [0, 1]");
        }
        match self.mode {
            Mode::Intervals => {
                if self.template.is_some() || self.matches_out.is_some() {
                    return usage("--template and --matches-out only apply to --mode series");
                }
            }
            Mode::Series => {
                if self.template.is_none() {
                    return usage("--mode series requires --template");
                }
                self.warp_config()?;
            }
        }
        Ok(())
    }

    /// Matching parameters; window and threshold have no defaults.
    pub fn warp_config(&self) -> Result<WarpConfig, CliError> {
        let window =
            self.dtw.window.ok_or_else(|| CliError::Usage("--mode series requires --dtw-window".into()))?;
        let threshold = self
            .dtw
            .threshold
            .ok_or_else(|| CliError::Usage("--mode series requires --dtw-threshold".into()))?;
        let cfg = WarpConfig {
            window,
            threshold,
            stretch: self.dtw.stretch,
            metric: self.dtw.metric,
            znormalize: self.dtw.znormalize,
        };
        cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(cfg)
    }
}

/// Parses a non-negative fraction written as `a/b`, a decimal such as
/// `0.85`, or a percentage such as `85%`.
pub fn parse_fraction(text: &str) -> Result<Ratio<u64>, String> {
    let text = text.trim();
    let bad = || format!("'{text}' is not a fraction, decimal or percentage");
    if let Some(pct) = text.strip_suffix('%') {
        return Ok(parse_fraction(pct)? / Ratio::from_integer(100));
    }
    if let Some((num, den)) = text.split_once('/') {
        let num: u64 = num.trim().parse().map_err(|_| bad())?;
        let den: u64 = den.trim().parse().map_err(|_| bad())?;
        if den == 0 {
            return Err(format!("'{text}' has a zero denominator"));
        }
        return Ok(Ratio::new(num, den));
    }
    let (int, frac) = text.split_once('.').unwrap_or((text, ""));
    if (int.is_empty() && frac.is_empty()) || frac.len() > 18 {
        return Err(bad());
    }
    let digits = |s: &str| s.is_empty() || s.bytes().all(|b| b.is_ascii_digit());
    if !digits(int) || !digits(frac) {
        return Err(bad());
    }
    let scale = 10u64.pow(frac.len() as u32);
    let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
    let frac: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
    let num = int.checked_mul(scale).and_then(|v| v.checked_add(frac)).ok_or_else(bad)?;
    Ok(Ratio::new(num, scale))
}

pub fn parse_level(text: &str) -> Result<PeriodLevel, String> {
    match text.trim().to_ascii_lowercase().as_str() {
        "yearly" | "year" => Ok(PeriodLevel::Yearly),
        "monthly" | "month" => Ok(PeriodLevel::Monthly),
        "daily" | "day" => Ok(PeriodLevel::Daily),
        "hourly" | "hour" => Ok(PeriodLevel::Hourly),
        other => Err(format!("unknown level '{other}' (yearly, monthly, daily, hourly)")),
    }
}

pub fn parse_resolution(text: &str) -> Result<Resolution, String> {
    match text.trim().to_ascii_lowercase().as_str() {
        "day" => Ok(Resolution::Day),
        "hour" => Ok(Resolution::Hour),
        "minute" => Ok(Resolution::Minute),
        "second" => Ok(Resolution::Second),
        other => Err(format!("unknown resolution '{other}' (day, hour, minute, second)")),
    }
}

pub fn parse_metric(text: &str) -> Result<Metric, String> {
    match text.trim().to_ascii_lowercase().as_str() {
        "absolute" | "abs" => Ok(Metric::Absolute),
        "squared" | "sq" => Ok(Metric::Squared),
        other => Err(format!("unknown metric '{other}' (absolute, squared)")),
    }
}

//! Library side of the `calper` command.
//!
//! [`run`] reads an interval dataset, or a time series plus a shape template,
//! mines calendar periodicities at one or more levels and writes a report.
//! Exit codes: 0 on success (zero hills included), 1 for usage and
//! configuration errors, 2 for unreadable or malformed input.

pub mod args;
pub mod config;
pub mod input;
pub mod report;

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;
use std::thread;

use calper_core::{
    find_matches, lifespan_cycles, merge_overlapping, mine_periodicities, CalendarError, CalendarInterval,
    ChangeRecord, CycleAxis, DtwError, KnotRecord, LocalMaximum, OccurrenceFunction, PeriodLevel,
    PeriodicityReport, Series, Template,
};
use serde::Serialize;
use thiserror::Error;

pub use config::{DtwSettings, Mode, OutputFormat, RunConfig};
pub use input::ParseError;
pub use report::{HillRow, LevelSummary, MatchRow, Report};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: io::Error },
    #[error(transparent)]
    Calendar(#[from] CalendarError),
    #[error(transparent)]
    Dtw(#[from] DtwError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Read { .. } => 2,
            _ => 1,
        }
    }
}

fn open(path: &Path) -> Result<File, CliError> {
    File::open(path).map_err(|source| CliError::Read { path: path.display().to_string(), source })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|source| CliError::Write { path: path.display().to_string(), source })
}

#[derive(Serialize)]
struct LevelRecords<'a> {
    level: PeriodLevel,
    changes: &'a [ChangeRecord<i64>],
    knots: Vec<KnotRecord<i64>>,
    hills: Vec<LocalMaximum<i64>>,
}

struct Extracted {
    occurrences: Vec<CalendarInterval>,
    resolution: calper_core::Resolution,
    matches: Option<Vec<MatchRow>>,
    warnings: Vec<String>,
}

fn extract_from_intervals(cfg: &RunConfig) -> Result<Extracted, CliError> {
    let data = input::read_intervals(open(&cfg.input)?, &cfg.input.display().to_string())?;
    let resolution = cfg.resolution.unwrap_or(data.resolution);
    Ok(Extracted {
        occurrences: data.at_resolution(resolution),
        resolution,
        matches: None,
        warnings: Vec::new(),
    })
}

fn extract_from_series(cfg: &RunConfig) -> Result<Extracted, CliError> {
    let warp = cfg.warp_config()?;
    let series = input::read_series(open(&cfg.input)?, &cfg.input.display().to_string())?;
    let template_path = cfg.template.as_deref().expect("validated");
    let template_name = template_path.display().to_string();
    let template = Template::new(input::read_template(open(template_path)?, &template_name)?)
        .map_err(|e| ParseError { source_name: template_name, line: 0, message: e.to_string() })?;
    let resolution = cfg.resolution.unwrap_or(series.resolution);

    let mut warnings = Vec::new();
    let mut rows = Vec::new();
    let mut occurrences = Vec::new();
    if series.values.is_empty() {
        warnings.push("series is empty".to_owned());
    } else {
        let s = Series::new(series.timestamps, series.values)?;
        let outcome = find_matches(&s, &template, &warp)?;
        if outcome.warning.is_some() {
            warnings.push("template is longer than the series".to_owned());
        }
        for m in outcome.matches {
            rows.push(MatchRow {
                start: input::format_stamp(m.start, resolution),
                end: input::format_stamp(m.end, resolution),
                start_index: m.start_index,
                end_index: m.end_index,
                score: m.score,
            });
            occurrences.push(CalendarInterval { start: m.start, end: m.end });
        }
    }
    Ok(Extracted { occurrences, resolution, matches: Some(rows), warnings })
}

/// Runs one mining job and writes its report and side outputs.
pub fn run(cfg: &RunConfig) -> Result<Report, CliError> {
    cfg.validate()?;
    let extracted = match cfg.mode {
        Mode::Intervals => extract_from_intervals(cfg)?,
        Mode::Series => extract_from_series(cfg)?,
    };
    let resolution = extracted.resolution;
    let disjoint = merge_overlapping(&extracted.occurrences, resolution);
    let axes =
        cfg.levels.iter().map(|&level| CycleAxis::new(level, resolution)).collect::<Result<Vec<_>, _>>()?;

    let mined: Vec<Result<Vec<PeriodicityReport>, CalendarError>> = thread::scope(|scope| {
        let handles: Vec<_> = axes
            .iter()
            .map(|axis| {
                let disjoint = &disjoint;
                scope.spawn(move || mine_periodicities(disjoint, axis, cfg.min_certainty))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("mining thread panicked")).collect()
    });

    let mut levels = Vec::with_capacity(axes.len());
    let mut hills = Vec::new();
    for (axis, reports) in axes.iter().zip(mined) {
        let reports = reports?;
        levels.push(LevelSummary {
            level: axis.level(),
            cycles: lifespan_cycles(&disjoint, axis.level()).unwrap_or(0),
            hills: reports.len(),
        });
        hills.extend(reports.iter().map(|r| HillRow::new(r, axis)));
    }

    if let Some(path) = &cfg.debug_records {
        let functions = axes
            .iter()
            .map(|axis| OccurrenceFunction::from_intervals(&axis.strip_disjoint(&disjoint)))
            .collect::<Result<Vec<_>, _>>()
            .map_err(CalendarError::from)?;
        let dump: Vec<LevelRecords> = axes
            .iter()
            .zip(&functions)
            .map(|(axis, f)| LevelRecords {
                level: axis.level(),
                changes: f.changes(),
                knots: f.knots(),
                hills: f.local_maxima(),
            })
            .collect();
        let mut json = serde_json::to_string_pretty(&dump).expect("records serialize");
        json.push('\n');
        write_file(path, json.as_bytes())?;
    }

    if let Some(path) = &cfg.matches_out {
        let mut buf = Vec::new();
        input::write_intervals(&mut buf, &extracted.occurrences, resolution).expect("writing to memory");
        write_file(path, &buf)?;
    }

    let report = Report {
        mode: match cfg.mode {
            Mode::Intervals => "intervals",
            Mode::Series => "series",
        },
        resolution,
        min_certainty: cfg.min_certainty.to_string(),
        occurrences: extracted.occurrences.len(),
        disjoint_occurrences: disjoint.len(),
        levels,
        hills,
        matches: extracted.matches,
        warnings: extracted.warnings,
    };

    let bytes = report.render(cfg.format);
    match &cfg.output {
        Some(path) => write_file(path, &bytes)?,
        None => io::stdout()
            .lock()
            .write_all(&bytes)
            .map_err(|source| CliError::Write { path: "<stdout>".into(), source })?,
    }
    Ok(report)
}

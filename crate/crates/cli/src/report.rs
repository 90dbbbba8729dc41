use std::io::Write;

use calper_core::{CycleAxis, PeriodLevel, Periodicity, PeriodicityReport, Resolution};
use num_rational::Ratio;
use serde::Serialize;

use crate::config::OutputFormat;

/// Certainty as a percentage rounded half up to one decimal.
pub fn percent_one_decimal(c: Ratio<u64>) -> f64 {
    let (num, den) = (*c.numer() as u128, *c.denom() as u128);
    let tenths = (2000 * num + den) / (2 * den);
    tenths as f64 / 10.0
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HillRow {
    pub level: PeriodLevel,
    /// Plateau rendered in calendar vocabulary.
    pub span: String,
    pub peak_first: i64,
    pub peak_last: i64,
    /// Slots where the hill rises above its valleys.
    pub support: String,
    pub support_first: i64,
    pub support_last: i64,
    pub certainty_percent: f64,
    /// Exact `peak / cycles`.
    pub certainty: String,
    pub classification: &'static str,
    pub cycles: u64,
    pub irregular_slot: bool,
    pub wraps_cycle_boundary: bool,
}

impl HillRow {
    pub fn new(r: &PeriodicityReport, axis: &CycleAxis) -> Self {
        let (pf, pl) = r.peak_span();
        let (sf, sl) = r.support_span();
        Self {
            level: r.level,
            span: axis.describe_span(pf, pl),
            peak_first: pf,
            peak_last: pl,
            support: axis.describe_span(sf, sl),
            support_first: sf,
            support_last: sl,
            certainty_percent: percent_one_decimal(r.peak_certainty),
            certainty: r.peak_certainty.to_string(),
            classification: match r.classification {
                Periodicity::Full => "full",
                Periodicity::Partial => "partial",
            },
            cycles: r.cycles,
            irregular_slot: r.irregular_slot,
            wraps_cycle_boundary: r.wraps_cycle_boundary,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelSummary {
    pub level: PeriodLevel,
    /// Cycles in the lifespan, zero without occurrences.
    pub cycles: u64,
    pub hills: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatchRow {
    pub start: String,
    pub end: String,
    pub start_index: usize,
    pub end_index: usize,
    pub score: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub mode: &'static str,
    pub resolution: Resolution,
    pub min_certainty: String,
    /// Occurrences fed to mining.
    pub occurrences: usize,
    /// Occurrences left after merging overlaps.
    pub disjoint_occurrences: usize,
    pub levels: Vec<LevelSummary>,
    pub hills: Vec<HillRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matches: Option<Vec<MatchRow>>,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// One row per hill.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(writer);
        if self.hills.is_empty() {
            w.write_record([
                "level",
                "span",
                "peak_first",
                "peak_last",
                "support",
                "support_first",
                "support_last",
                "certainty_percent",
                "certainty",
                "classification",
                "cycles",
                "irregular_slot",
                "wraps_cycle_boundary",
            ])?;
        }
        for row in &self.hills {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn render(&self, format: OutputFormat) -> Vec<u8> {
        match format {
            OutputFormat::Json => self.to_json().into_bytes(),
            OutputFormat::Csv => {
                let mut out = Vec::new();
                self.write_csv(&mut out).expect("writing to memory");
                out
            }
        }
    }
}

//! Calendar periodicity mining.
//!
//! Pattern occurrences are closed calendar intervals at a dataset
//! [`Resolution`]. To mine periodicities at a [`PeriodLevel`], occurrences are
//! merged until disjoint, split at cycle boundaries, and stripped of the
//! calendar fields above the level so that every cycle overlays onto one
//! cyclic axis. The occurrence function on that axis counts, per stripped
//! slot, how many cycles saw the pattern; dividing by the number of cycles in
//! the lifespan gives the certainty of each hill.
//!
//! The yearly axis uses a 366-slot day layout that always contains Feb 29,
//! and the monthly axis uses 31 day slots. Slots that do not exist in every
//! cycle are flagged on the reports that touch them.

use std::fmt;

use chrono::{Datelike, Duration, NaiveDate, NaiveDateTime, NaiveTime, Timelike};
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interval::{Interval, IntervalError, LocalMaximum, OccurrenceFunction};

/// A Gregorian date and wall-clock time. Fields finer than the dataset
/// resolution are ignored.
pub type CalendarStamp = NaiveDateTime;

const MONTH_ABBR: [&str; 12] =
    ["Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"];

/// Days before each month in a leap year.
const LEAP_CUMULATIVE_DAYS: [i64; 12] = [0, 31, 60, 91, 121, 152, 182, 213, 244, 274, 305, 335];

const FEB_29_SLOT: i64 = 60;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum CalendarError {
    #[error("{level} periodicities need a resolution finer than {resolution}")]
    UnsupportedLevel { level: PeriodLevel, resolution: Resolution },
    #[error("interval {index} starts after it ends")]
    Reversed { index: usize },
    #[error("no intervals given")]
    EmptyInput,
    #[error("minimum certainty {0} is outside [0, 1]")]
    CertaintyOutOfRange(Ratio<u64>),
    #[error(transparent)]
    Interval(#[from] IntervalError),
}

/// Smallest time unit a dataset distinguishes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Resolution {
    Day,
    Hour,
    Minute,
    Second,
}

impl Resolution {
    pub fn unit_seconds(self) -> i64 {
        match self {
            Resolution::Day => 86_400,
            Resolution::Hour => 3_600,
            Resolution::Minute => 60,
            Resolution::Second => 1,
        }
    }

    pub fn units_per_day(self) -> i64 {
        86_400 / self.unit_seconds()
    }

    pub fn duration(self) -> Duration {
        Duration::seconds(self.unit_seconds())
    }

    /// Drops the fields finer than this resolution.
    pub fn truncate(self, stamp: CalendarStamp) -> CalendarStamp {
        let secs = stamp.num_seconds_from_midnight() as i64;
        let kept = secs - secs % self.unit_seconds();
        let time = NaiveTime::from_num_seconds_from_midnight_opt(kept as u32, 0)
            .expect("seconds of day stay in range");
        stamp.date().and_time(time)
    }

    /// Units elapsed within the stamp's day.
    fn unit_of_day(self, stamp: CalendarStamp) -> i64 {
        stamp.num_seconds_from_midnight() as i64 / self.unit_seconds()
    }

    /// Position of `stamp` on a discrete axis counting resolution units
    /// from 1 Jan of year 1.
    pub fn tick(self, stamp: CalendarStamp) -> i64 {
        stamp.date().num_days_from_ce() as i64 * self.units_per_day() + self.unit_of_day(stamp)
    }

    pub fn from_tick(self, tick: i64) -> CalendarStamp {
        let upd = self.units_per_day();
        let days = tick.div_euclid(upd);
        let unit = tick.rem_euclid(upd);
        let date = NaiveDate::from_num_days_from_ce_opt(days as i32).expect("tick in date range");
        date.and_time(NaiveTime::MIN) + Duration::seconds(unit * self.unit_seconds())
    }
}

impl fmt::Display for Resolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Resolution::Day => "day",
            Resolution::Hour => "hour",
            Resolution::Minute => "minute",
            Resolution::Second => "second",
        })
    }
}

/// Calendar cycle whose periodicities are mined.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PeriodLevel {
    Yearly,
    Monthly,
    Daily,
    Hourly,
}

impl PeriodLevel {
    /// Ordinal of the cycle containing `stamp`; consecutive cycles differ by one.
    pub fn cycle_ordinal(self, stamp: CalendarStamp) -> i64 {
        match self {
            PeriodLevel::Yearly => stamp.year() as i64,
            PeriodLevel::Monthly => stamp.year() as i64 * 12 + stamp.month0() as i64,
            PeriodLevel::Daily => stamp.date().num_days_from_ce() as i64,
            PeriodLevel::Hourly => stamp.date().num_days_from_ce() as i64 * 24 + stamp.hour() as i64,
        }
    }

    /// First instant of the cycle containing `stamp`.
    pub fn cycle_start(self, stamp: CalendarStamp) -> CalendarStamp {
        let date = stamp.date();
        match self {
            PeriodLevel::Yearly => ymd(date.year(), 1, 1).and_time(NaiveTime::MIN),
            PeriodLevel::Monthly => ymd(date.year(), date.month(), 1).and_time(NaiveTime::MIN),
            PeriodLevel::Daily => date.and_time(NaiveTime::MIN),
            PeriodLevel::Hourly => Resolution::Hour.truncate(stamp),
        }
    }

    /// First instant of the cycle after the one containing `stamp`.
    pub fn next_cycle_start(self, stamp: CalendarStamp) -> CalendarStamp {
        let start = self.cycle_start(stamp);
        match self {
            PeriodLevel::Yearly => ymd(start.year() + 1, 1, 1).and_time(NaiveTime::MIN),
            PeriodLevel::Monthly => {
                let (y, m) = if start.month() == 12 {
                    (start.year() + 1, 1)
                } else {
                    (start.year(), start.month() + 1)
                };
                ymd(y, m, 1).and_time(NaiveTime::MIN)
            }
            PeriodLevel::Daily => start + Duration::days(1),
            PeriodLevel::Hourly => start + Duration::hours(1),
        }
    }
}

impl fmt::Display for PeriodLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PeriodLevel::Yearly => "yearly",
            PeriodLevel::Monthly => "monthly",
            PeriodLevel::Daily => "daily",
            PeriodLevel::Hourly => "hourly",
        })
    }
}

fn ymd(y: i32, m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).expect("valid calendar date")
}

fn is_leap(year: i32) -> bool {
    (year % 4 == 0 && year % 100 != 0) || year % 400 == 0
}

/// Day slot of a month/day pair in the 366-day leap layout, 1-based.
pub fn leap_day_slot(month: u32, day: u32) -> i64 {
    LEAP_CUMULATIVE_DAYS[month as usize - 1] + day as i64
}

fn slot_to_month_day(slot: i64) -> (u32, u32) {
    let month = LEAP_CUMULATIVE_DAYS.iter().rposition(|&c| c < slot).expect("slot is at least 1");
    (month as u32 + 1, (slot - LEAP_CUMULATIVE_DAYS[month]) as u32)
}

/// A closed calendar interval; both ends belong to it at the dataset
/// resolution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CalendarInterval {
    pub start: CalendarStamp,
    pub end: CalendarStamp,
}

impl CalendarInterval {
    pub fn new(start: CalendarStamp, end: CalendarStamp) -> Result<Self, CalendarError> {
        if start > end {
            return Err(CalendarError::Reversed { index: 0 });
        }
        Ok(Self { start, end })
    }

    /// Whole-day interval between two dates.
    pub fn days(start: NaiveDate, end: NaiveDate) -> Result<Self, CalendarError> {
        Self::new(start.and_time(NaiveTime::MIN), end.and_time(NaiveTime::MIN))
    }

    fn truncated(&self, res: Resolution) -> Self {
        Self { start: res.truncate(self.start), end: res.truncate(self.end) }
    }

    /// Renders the interval like "18th Dec, 2001 to 31st Dec, 2001", with
    /// the time of day appended below day resolution.
    pub fn describe(&self, res: Resolution) -> String {
        format!("{} to {}", long_stamp(self.start, res), long_stamp(self.end, res))
    }
}

fn ordinal_suffix(day: u32) -> &'static str {
    match (day % 10, day % 100) {
        (_, 11..=13) => "th",
        (1, _) => "st",
        (2, _) => "nd",
        (3, _) => "rd",
        _ => "th",
    }
}

fn long_stamp(stamp: CalendarStamp, res: Resolution) -> String {
    let date = format!(
        "{}{} {}, {}",
        stamp.day(),
        ordinal_suffix(stamp.day()),
        MONTH_ABBR[stamp.month0() as usize],
        stamp.year()
    );
    match time_text(stamp.num_seconds_from_midnight() as i64, res) {
        Some(t) => format!("{date} {t}"),
        None => date,
    }
}

fn time_text(seconds_of_day: i64, res: Resolution) -> Option<String> {
    let (h, m, s) = (seconds_of_day / 3600, seconds_of_day / 60 % 60, seconds_of_day % 60);
    match res {
        Resolution::Day => None,
        Resolution::Hour | Resolution::Minute => Some(format!("{h:02}:{m:02}")),
        Resolution::Second => Some(format!("{h:02}:{m:02}:{s:02}")),
    }
}

/// Sorts intervals and merges every pair that overlaps or touches at the
/// given resolution. The result is disjoint, sorted and covers the same
/// instants.
pub fn merge_overlapping(intervals: &[CalendarInterval], res: Resolution) -> Vec<CalendarInterval> {
    let mut sorted: Vec<CalendarInterval> = intervals.iter().map(|iv| iv.truncated(res)).collect();
    sorted.sort_by_key(|iv| (iv.start, iv.end));

    let mut merged: Vec<CalendarInterval> = Vec::with_capacity(sorted.len());
    for iv in sorted {
        match merged.last_mut() {
            Some(last) if res.tick(iv.start) <= res.tick(last.end) + 1 => {
                last.end = last.end.max(iv.end);
            }
            _ => merged.push(iv),
        }
    }
    merged
}

/// Number of `level` cycles touched by the span from the earliest start to
/// the latest end, counting partially covered boundary cycles.
pub fn lifespan_cycles(intervals: &[CalendarInterval], level: PeriodLevel) -> Result<u64, CalendarError> {
    let first = intervals.iter().map(|iv| iv.start).min().ok_or(CalendarError::EmptyInput)?;
    let last = intervals.iter().map(|iv| iv.end).max().ok_or(CalendarError::EmptyInput)?;
    let span = level.cycle_ordinal(last) - level.cycle_ordinal(first);
    Ok(span.max(0) as u64 + 1)
}

/// Position within one cycle of a [`CycleAxis`], 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StrippedStamp {
    pub offset: i64,
}

/// A period level paired with the dataset resolution: the cyclic axis onto
/// which occurrences are stripped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CycleAxis {
    level: PeriodLevel,
    resolution: Resolution,
}

impl CycleAxis {
    pub fn new(level: PeriodLevel, resolution: Resolution) -> Result<Self, CalendarError> {
        let ok = match level {
            PeriodLevel::Yearly | PeriodLevel::Monthly => true,
            PeriodLevel::Daily => resolution > Resolution::Day,
            PeriodLevel::Hourly => resolution > Resolution::Hour,
        };
        if !ok {
            return Err(CalendarError::UnsupportedLevel { level, resolution });
        }
        Ok(Self { level, resolution })
    }

    pub fn level(&self) -> PeriodLevel {
        self.level
    }

    pub fn resolution(&self) -> Resolution {
        self.resolution
    }

    /// Number of slots in one cycle.
    pub fn cycle_len(&self) -> i64 {
        let upd = self.resolution.units_per_day();
        match self.level {
            PeriodLevel::Yearly => 366 * upd,
            PeriodLevel::Monthly => 31 * upd,
            PeriodLevel::Daily => upd,
            PeriodLevel::Hourly => 3600 / self.resolution.unit_seconds(),
        }
    }

    /// Removes the calendar fields above the level, leaving the position of
    /// `stamp` within its cycle.
    pub fn strip(&self, stamp: CalendarStamp) -> StrippedStamp {
        let res = self.resolution;
        let upd = res.units_per_day();
        let unit = res.unit_of_day(stamp);
        let offset = match self.level {
            PeriodLevel::Yearly => (leap_day_slot(stamp.month(), stamp.day()) - 1) * upd + unit,
            PeriodLevel::Monthly => (stamp.day() as i64 - 1) * upd + unit,
            PeriodLevel::Daily => unit,
            PeriodLevel::Hourly => (stamp.minute() as i64 * 60 + stamp.second() as i64) / res.unit_seconds(),
        };
        StrippedStamp { offset: offset + 1 }
    }

    /// Splits an interval at cycle boundaries so that every piece lies in a
    /// single cycle. The pieces are contiguous and cover the input exactly.
    pub fn split(&self, interval: &CalendarInterval) -> Vec<CalendarInterval> {
        let iv = interval.truncated(self.resolution);
        let mut pieces = Vec::new();
        let mut cur = iv.start;
        loop {
            let next = self.level.next_cycle_start(cur);
            let cycle_last = next - self.resolution.duration();
            if iv.end <= cycle_last {
                pieces.push(CalendarInterval { start: cur, end: iv.end });
                return pieces;
            }
            pieces.push(CalendarInterval { start: cur, end: cycle_last });
            cur = next;
        }
    }

    /// Whether a slot is missing from some cycles: Feb 29 on the yearly
    /// axis, days 29 to 31 on the monthly axis.
    pub fn is_irregular(&self, offset: i64) -> bool {
        let day_slot = (offset - 1) / self.resolution.units_per_day() + 1;
        match self.level {
            PeriodLevel::Yearly => day_slot == FEB_29_SLOT,
            PeriodLevel::Monthly => day_slot >= 29,
            PeriodLevel::Daily | PeriodLevel::Hourly => false,
        }
    }

    /// Renders a slot in calendar vocabulary: "12 Jul" on the yearly axis,
    /// "10th" on the monthly axis, "14:00" on the daily axis and "xx:30" on
    /// the hourly axis. Times of day are appended below day resolution.
    pub fn describe(&self, offset: i64) -> String {
        let res = self.resolution;
        let upd = res.units_per_day();
        let idx = offset - 1;
        let within_day = idx.rem_euclid(upd) * res.unit_seconds();
        let with_time = |day: String| match time_text(within_day, res) {
            Some(t) => format!("{day} {t}"),
            None => day,
        };
        match self.level {
            PeriodLevel::Yearly => {
                let (m, d) = slot_to_month_day(idx.div_euclid(upd) + 1);
                with_time(format!("{d} {}", MONTH_ABBR[m as usize - 1]))
            }
            PeriodLevel::Monthly => {
                let d = (idx.div_euclid(upd) + 1) as u32;
                with_time(format!("{d}{}", ordinal_suffix(d)))
            }
            PeriodLevel::Daily => time_text(within_day, res).unwrap_or_default(),
            PeriodLevel::Hourly => {
                let secs = idx * res.unit_seconds();
                match res {
                    Resolution::Second => format!("xx:{:02}:{:02}", secs / 60, secs % 60),
                    _ => format!("xx:{:02}", secs / 60),
                }
            }
        }
    }

    /// Renders a slot range, collapsing it to one slot when both ends agree.
    pub fn describe_span(&self, first: i64, last: i64) -> String {
        if first == last {
            self.describe(first)
        } else {
            format!("{} \u{2013} {}", self.describe(first), self.describe(last))
        }
    }

    /// Strips disjoint intervals onto the cyclic axis.
    ///
    /// Each interval is split at cycle boundaries first. On the yearly axis a
    /// piece from a non-leap year that runs across the end of February is
    /// split again around the Feb 29 slot, which that year never covers.
    pub fn strip_disjoint(&self, disjoint: &[CalendarInterval]) -> Vec<Interval<i64>> {
        let mut out = Vec::with_capacity(disjoint.len());
        for iv in disjoint {
            for piece in self.split(iv) {
                let lo = self.strip(piece.start).offset;
                let hi = self.strip(piece.end).offset;
                let year = piece.start.year();
                if self.level == PeriodLevel::Yearly && !is_leap(year) {
                    let mar1 = ymd(year, 3, 1).and_time(NaiveTime::MIN);
                    if piece.start < mar1 && piece.end >= mar1 {
                        let feb28_last = mar1 - self.resolution.duration();
                        out.push(closed(lo, self.strip(feb28_last).offset));
                        out.push(closed(self.strip(mar1).offset, hi));
                        continue;
                    }
                }
                out.push(closed(lo, hi));
            }
        }
        out
    }

    /// Merges, splits and strips raw occurrences.
    pub fn stripped_list(&self, intervals: &[CalendarInterval]) -> Vec<Interval<i64>> {
        self.strip_disjoint(&merge_overlapping(intervals, self.resolution))
    }
}

fn closed(lo: i64, hi: i64) -> Interval<i64> {
    Interval::closed(lo, hi).expect("stripping is monotone within a cycle")
}

/// Splits an interval into pieces lying in single `level` cycles.
pub fn split_by_cycle(interval: &CalendarInterval, axis: &CycleAxis) -> Vec<CalendarInterval> {
    axis.split(interval)
}

/// Position of `stamp` within its cycle on `axis`.
pub fn strip(stamp: CalendarStamp, axis: &CycleAxis) -> StrippedStamp {
    axis.strip(stamp)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Periodicity {
    Full,
    Partial,
}

/// One hill of the stripped occurrence function with its certainty.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodicityReport {
    /// Hill over stripped slot offsets.
    pub hill: LocalMaximum<i64>,
    /// `peakval / cycles`.
    pub peak_certainty: Ratio<u64>,
    pub classification: Periodicity,
    /// Cycles in the lifespan.
    pub cycles: u64,
    pub level: PeriodLevel,
    /// The plateau touches a slot that some cycles lack.
    pub irregular_slot: bool,
    /// The hill reaches a cycle edge and another hill reaches the opposite
    /// edge, so the two may be one occurrence split by the boundary.
    pub wraps_cycle_boundary: bool,
}

impl PeriodicityReport {
    /// Plateau slots, first and last.
    pub fn peak_span(&self) -> (i64, i64) {
        (self.hill.peakstart, self.hill.peakend)
    }

    /// Slots where the hill is above its surrounding valleys, first and last.
    pub fn support_span(&self) -> (i64, i64) {
        (self.hill.start + 1, self.hill.end - 1)
    }
}

/// Mines full and partial periodicities of a pattern at `axis`'s level.
///
/// Occurrences are merged until disjoint, then split and stripped; each hill
/// of the stripped occurrence function becomes a report with certainty
/// `peakval / N`, N being the number of cycles in the lifespan. Hills below
/// `min_certainty` are dropped.
pub fn mine_periodicities(
    intervals: &[CalendarInterval],
    axis: &CycleAxis,
    min_certainty: Ratio<u64>,
) -> Result<Vec<PeriodicityReport>, CalendarError> {
    if min_certainty > Ratio::from_integer(1) {
        return Err(CalendarError::CertaintyOutOfRange(min_certainty));
    }
    if let Some(index) = intervals.iter().position(|iv| iv.start > iv.end) {
        return Err(CalendarError::Reversed { index });
    }
    if intervals.is_empty() {
        return Ok(Vec::new());
    }

    let merged = merge_overlapping(intervals, axis.resolution);
    let cycles = lifespan_cycles(&merged, axis.level)?;
    let occurrence = OccurrenceFunction::from_intervals(&axis.strip_disjoint(&merged))?;
    let hills = occurrence.local_maxima();

    let cycle_len = axis.cycle_len();
    let touches_first = hills.first().is_some_and(|h| h.start <= 0);
    let touches_last = hills.last().is_some_and(|h| h.end > cycle_len);
    let wraps = hills.len() > 1 && touches_first && touches_last;

    let mut reports = Vec::with_capacity(hills.len());
    for (i, hill) in hills.iter().enumerate() {
        let peak_certainty = Ratio::new(hill.peakval as u64, cycles);
        if peak_certainty < min_certainty {
            continue;
        }
        let classification =
            if peak_certainty == Ratio::from_integer(1) { Periodicity::Full } else { Periodicity::Partial };
        let irregular_slot = (hill.peakstart..=hill.peakend).any(|o| axis.is_irregular(o));
        reports.push(PeriodicityReport {
            hill: *hill,
            peak_certainty,
            classification,
            cycles,
            level: axis.level,
            irregular_slot,
            wraps_cycle_boundary: wraps && (i == 0 || i == hills.len() - 1),
        });
    }
    Ok(reports)
}

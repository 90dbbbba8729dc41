//! Dataset readers and the interval CSV writer.
//!
//! Interval files have a `start,end` header and one closed interval per row.
//! Series files have a `date,value` header. Timestamps are ISO-8601 dates or
//! date-times; the dataset resolution is the coarsest one that represents
//! every timestamp exactly.

use std::io::{Read, Write};

use calper_core::{CalendarInterval, Resolution};
use chrono::{Duration, NaiveDate, NaiveDateTime, NaiveTime, Timelike};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{source_name}:{line}: {message}")]
pub struct ParseError {
    pub source_name: String,
    pub line: u64,
    pub message: String,
}

/// A parsed timestamp and whether it was written without a time of day.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Stamp {
    pub value: NaiveDateTime,
    pub date_only: bool,
}

const DATETIME_FORMATS: [&str; 4] =
    ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f", "%Y-%m-%dT%H:%M", "%Y-%m-%d %H:%M"];

pub fn parse_stamp(text: &str) -> Result<Stamp, String> {
    let text = text.trim();
    if let Ok(date) = NaiveDate::parse_from_str(text, "%Y-%m-%d") {
        return Ok(Stamp { value: date.and_time(NaiveTime::MIN), date_only: true });
    }
    DATETIME_FORMATS
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(text, f).ok())
        .map(|value| Stamp { value, date_only: false })
        .ok_or_else(|| format!("'{text}' is not an ISO-8601 date or date-time"))
}

/// Coarsest resolution at which every stamp is exact.
pub fn detect_resolution<'a>(stamps: impl IntoIterator<Item = &'a Stamp>) -> Resolution {
    let mut res = Resolution::Day;
    for s in stamps {
        let needed = if s.date_only {
            Resolution::Day
        } else if s.value.second() != 0 || s.value.nanosecond() != 0 {
            Resolution::Second
        } else if s.value.minute() != 0 {
            Resolution::Minute
        } else {
            Resolution::Hour
        };
        res = res.max(needed);
    }
    res
}

pub fn format_stamp(stamp: NaiveDateTime, res: Resolution) -> String {
    let fmt = match res {
        Resolution::Day => "%Y-%m-%d",
        Resolution::Hour | Resolution::Minute => "%Y-%m-%dT%H:%M",
        Resolution::Second => "%Y-%m-%dT%H:%M:%S",
    };
    stamp.format(fmt).to_string()
}

/// Parsed occurrences plus the resolution their timestamps call for.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalData {
    pub intervals: Vec<CalendarInterval>,
    pub resolution: Resolution,
    /// Every timestamp was a bare date.
    pub date_only: bool,
}

impl IntervalData {
    /// Occurrences as seen at `res`. Bare dates read at a finer resolution
    /// cover their whole end day.
    pub fn at_resolution(&self, res: Resolution) -> Vec<CalendarInterval> {
        if !self.date_only || res == Resolution::Day {
            return self.intervals.clone();
        }
        let extend = Duration::days(1) - res.duration();
        self.intervals.iter().map(|iv| CalendarInterval { start: iv.start, end: iv.end + extend }).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeriesData {
    pub timestamps: Vec<NaiveDateTime>,
    pub values: Vec<f64>,
    pub resolution: Resolution,
}

fn csv_reader<R: Read>(reader: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().trim(csv::Trim::All).has_headers(true).from_reader(reader)
}

fn check_header<R: Read>(
    rdr: &mut csv::Reader<R>,
    expected: [&str; 2],
    err: &impl Fn(u64, String) -> ParseError,
) -> Result<(), ParseError> {
    let headers = rdr.headers().map_err(|e| err(1, e.to_string()))?;
    let names: Vec<String> =
        headers.iter().map(|h| h.trim_start_matches('\u{feff}').to_ascii_lowercase()).collect();
    if names != expected {
        return Err(err(1, format!("expected header '{}', found '{}'", expected.join(","), names.join(","))));
    }
    Ok(())
}

fn record_line(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

fn csv_error_line(e: &csv::Error) -> u64 {
    e.position().map_or(0, |p| p.line())
}

pub fn read_intervals<R: Read>(reader: R, source_name: &str) -> Result<IntervalData, ParseError> {
    let err = |line: u64, message: String| ParseError { source_name: source_name.to_owned(), line, message };
    let mut rdr = csv_reader(reader);
    check_header(&mut rdr, ["start", "end"], &err)?;

    let mut intervals = Vec::new();
    let mut stamps = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| err(csv_error_line(&e), e.to_string()))?;
        let line = record_line(&record);
        if record.len() != 2 {
            return Err(err(line, format!("expected 2 fields, found {}", record.len())));
        }
        let start = parse_stamp(&record[0]).map_err(|m| err(line, m))?;
        let end = parse_stamp(&record[1]).map_err(|m| err(line, m))?;
        if start.value > end.value {
            return Err(err(line, format!("start {} is after end {}", &record[0], &record[1])));
        }
        intervals.push(CalendarInterval { start: start.value, end: end.value });
        stamps.extend([start, end]);
    }
    Ok(IntervalData {
        resolution: detect_resolution(&stamps),
        date_only: stamps.iter().all(|s| s.date_only),
        intervals,
    })
}

pub fn read_series<R: Read>(reader: R, source_name: &str) -> Result<SeriesData, ParseError> {
    let err = |line: u64, message: String| ParseError { source_name: source_name.to_owned(), line, message };
    let mut rdr = csv_reader(reader);
    check_header(&mut rdr, ["date", "value"], &err)?;

    let mut stamps: Vec<Stamp> = Vec::new();
    let mut values = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| err(csv_error_line(&e), e.to_string()))?;
        let line = record_line(&record);
        if record.len() != 2 {
            return Err(err(line, format!("expected 2 fields, found {}", record.len())));
        }
        let stamp = parse_stamp(&record[0]).map_err(|m| err(line, m))?;
        if let Some(prev) = stamps.last() {
            if stamp.value <= prev.value {
                return Err(err(line, format!("timestamp {} does not increase", &record[0])));
            }
        }
        let value: f64 = record[1]
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| err(line, format!("'{}' is not a finite number", &record[1])))?;
        stamps.push(stamp);
        values.push(value);
    }
    Ok(SeriesData {
        resolution: detect_resolution(&stamps),
        timestamps: stamps.iter().map(|s| s.value).collect(),
        values,
    })
}

/// Reads one number per line. Blank lines are skipped, and so is a first
/// non-blank line that is not a number.
pub fn read_template<R: Read>(mut reader: R, source_name: &str) -> Result<Vec<f64>, ParseError> {
    let err = |line: u64, message: String| ParseError { source_name: source_name.to_owned(), line, message };
    let mut text = String::new();
    reader.read_to_string(&mut text).map_err(|e| err(0, e.to_string()))?;
    let mut values = Vec::new();
    let mut seen_content = false;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim().trim_end_matches(',').trim();
        if line.is_empty() {
            continue;
        }
        let first = !seen_content;
        seen_content = true;
        match line.parse::<f64>() {
            Ok(v) if v.is_finite() => values.push(v),
            Ok(_) => return Err(err(i as u64 + 1, format!("'{line}' is not finite"))),
            Err(_) if first => continue,
            Err(_) => return Err(err(i as u64 + 1, format!("'{line}' is not a number"))),
        }
    }
    Ok(values)
}

/// Writes intervals in the format [`read_intervals`] accepts.
pub fn write_intervals<W: Write>(
    writer: W,
    intervals: &[CalendarInterval],
    res: Resolution,
) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["start", "end"])?;
    for iv in intervals {
        w.write_record([format_stamp(iv.start, res), format_stamp(iv.end, res)])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stamp(s: &str) -> Stamp {
        parse_stamp(s).unwrap()
    }

    #[test]
    fn stamp_forms() {
        assert!(stamp("2001-12-18").date_only);
        let t = stamp("2001-12-18T14:30");
        assert!(!t.date_only);
        assert_eq!(t.value.hour(), 14);
        assert_eq!(stamp("2001-12-18 14:30:05").value.second(), 5);
        assert!(parse_stamp("18/12/2001").is_err());
        assert!(parse_stamp("2001-02-29").is_err());
    }

    #[test]
    fn resolution_detection() {
        let r = |xs: &[&str]| detect_resolution(&xs.iter().map(|s| stamp(s)).collect::<Vec<_>>());
        assert_eq!(r(&["2001-01-01", "2001-02-01"]), Resolution::Day);
        assert_eq!(r(&["2001-01-01", "2001-02-01T00:00"]), Resolution::Hour);
        assert_eq!(r(&["2001-01-01T05:00", "2001-02-01T00:30"]), Resolution::Minute);
        assert_eq!(r(&["2001-01-01T05:00:01"]), Resolution::Second);
        assert_eq!(r(&[]), Resolution::Day);
    }

    #[test]
    fn interval_rows_report_line_numbers() {
        let data = "start,end\n2001-07-10,2001-07-15\n2002-07-10,bogus\n";
        let e = read_intervals(data.as_bytes(), "in.csv").unwrap_err();
        assert_eq!((e.line, e.source_name.as_str()), (3, "in.csv"));
        let e = read_intervals("start,end\n2001-07-15,2001-07-10\n".as_bytes(), "x").unwrap_err();
        assert_eq!(e.line, 2);
        let e = read_intervals("from,to\n".as_bytes(), "x").unwrap_err();
        assert_eq!(e.line, 1);
        let e = read_intervals("start,end\n2001-07-15\n".as_bytes(), "x").unwrap_err();
        assert_eq!(e.line, 2);
    }

    #[test]
    fn whole_days_widen_at_finer_resolution() {
        let data = read_intervals("start,end\n2001-07-10,2001-07-15\n".as_bytes(), "x").unwrap();
        assert_eq!(data.resolution, Resolution::Day);
        let hours = data.at_resolution(Resolution::Hour);
        assert_eq!(format_stamp(hours[0].end, Resolution::Hour), "2001-07-15T23:00");
    }

    #[test]
    fn series_must_increase() {
        let e = read_series("date,value\n2001-01-02,1\n2001-01-01,2\n".as_bytes(), "s").unwrap_err();
        assert_eq!(e.line, 3);
        let e = read_series("date,value\n2001-01-02,nan\n".as_bytes(), "s").unwrap_err();
        assert_eq!(e.line, 2);
        let s = read_series("date,value\n2001-01-01,1.5\n2001-01-02,2\n".as_bytes(), "s").unwrap();
        assert_eq!(s.values, vec![1.5, 2.0]);
    }

    #[test]
    fn template_header_and_blank_lines() {
        let t = read_template("value\n\n1\n2.5\n\n3\n".as_bytes(), "t").unwrap();
        assert_eq!(t, vec![1.0, 2.5, 3.0]);
        let e = read_template("1\nx\n".as_bytes(), "t").unwrap_err();
        assert_eq!(e.line, 2);
    }

    #[test]
    fn writer_output_reads_back() {
        let data = read_intervals("start,end\n2001-07-10T05:00,2001-07-15T06:30\n".as_bytes(), "x").unwrap();
        let mut out = Vec::new();
        write_intervals(&mut out, &data.intervals, data.resolution).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "start,end\n2001-07-10T05:00,2001-07-15T06:30\n");
    }
}

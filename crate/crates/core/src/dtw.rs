//! Dynamic time warping and template search.
//!
//! [`dtw_distance`] aligns two sequences along a monotone, continuous warping
//! path confined to a Sakoe-Chiba band `|i - j| <= w` and returns the minimal
//! cumulative distance together with the number of grid points on the
//! optimal path. [`find_matches`] slides candidate windows of several lengths
//! over a series, keeps those whose path-length-normalized distance to the
//! template is within a threshold, and merges overlapping hits into the
//! intervals where the pattern occurs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum DtwError {
    #[error("cannot align an empty sequence")]
    Empty,
    #[error("lengths {left} and {right} differ by more than the warping window {window}")]
    WindowInfeasible { left: usize, right: usize, window: usize },
    #[error("template needs at least 2 values, got {0}")]
    TemplateTooShort(usize),
    #[error("value at position {0} is not finite")]
    NonFinite(usize),
    #[error("series has {timestamps} timestamps but {values} values")]
    LengthMismatch { timestamps: usize, values: usize },
    #[error("series timestamps are not strictly ascending at position {0}")]
    NotAscending(usize),
    #[error("invalid warp configuration: {0}")]
    Config(&'static str),
}

/// Pointwise distance between aligned elements.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    #[default]
    Absolute,
    Squared,
}

impl Metric {
    #[inline]
    pub fn eval(self, x: f64, y: f64) -> f64 {
        match self {
            Metric::Absolute => (x - y).abs(),
            Metric::Squared => (x - y) * (x - y),
        }
    }
}

/// Cost of an optimal warping path.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DtwCost {
    pub cost: f64,
    /// Grid points on the optimal path.
    pub path_len: usize,
}

impl DtwCost {
    pub fn normalized(&self) -> f64 {
        self.cost / self.path_len as f64
    }
}

/// Windowed DTW with absolute difference.
pub fn dtw_distance(a: &[f64], b: &[f64], window: usize) -> Result<DtwCost, DtwError> {
    dtw_distance_with(a, b, window, Metric::Absolute)
}

/// Windowed DTW under `metric`.
///
/// Each cell takes the cheapest of its diagonal, vertical `(i-1, j)` and
/// horizontal `(i, j-1)` predecessors; on equal cost the earlier of the three
/// wins, which only affects the reported path length.
pub fn dtw_distance_with(a: &[f64], b: &[f64], window: usize, metric: Metric) -> Result<DtwCost, DtwError> {
    let (n, m) = (a.len(), b.len());
    if n == 0 || m == 0 {
        return Err(DtwError::Empty);
    }
    if n.abs_diff(m) > window {
        return Err(DtwError::WindowInfeasible { left: n, right: m, window });
    }

    const OUT: (f64, usize) = (f64::INFINITY, 0);
    let mut prev = vec![OUT; m];
    let mut cur = vec![OUT; m];

    for (i, &ai) in a.iter().enumerate() {
        cur.fill(OUT);
        let lo = i.saturating_sub(window);
        let hi = (i + window).min(m - 1);
        for j in lo..=hi {
            let step = metric.eval(ai, b[j]);
            if i == 0 && j == 0 {
                cur[0] = (step, 1);
                continue;
            }
            let mut best = OUT;
            if i > 0 && j > 0 {
                best = prev[j - 1];
            }
            if i > 0 && prev[j].0 < best.0 {
                best = prev[j];
            }
            if j > 0 && cur[j - 1].0 < best.0 {
                best = cur[j - 1];
            }
            if best.0.is_finite() {
                cur[j] = (best.0 + step, best.1 + 1);
            }
        }
        std::mem::swap(&mut prev, &mut cur);
    }

    let (cost, path_len) = prev[m - 1];
    Ok(DtwCost { cost, path_len })
}

/// A time series: strictly ascending timestamps with finite values.
#[derive(Clone, Debug, PartialEq)]
pub struct Series<T> {
    timestamps: Vec<T>,
    values: Vec<f64>,
}

impl<T: Copy + Ord> Series<T> {
    pub fn new(timestamps: Vec<T>, values: Vec<f64>) -> Result<Self, DtwError> {
        if timestamps.len() != values.len() {
            return Err(DtwError::LengthMismatch { timestamps: timestamps.len(), values: values.len() });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(DtwError::NonFinite(i));
        }
        if let Some(i) = timestamps.windows(2).position(|w| w[0] >= w[1]) {
            return Err(DtwError::NotAscending(i + 1));
        }
        Ok(Self { timestamps, values })
    }

    pub fn timestamps(&self) -> &[T] {
        &self.timestamps
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Shape searched for in a series.
#[derive(Clone, Debug, PartialEq)]
pub struct Template {
    values: Vec<f64>,
}

impl Template {
    pub fn new(values: Vec<f64>) -> Result<Self, DtwError> {
        if values.len() < 2 {
            return Err(DtwError::TemplateTooShort(values.len()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(DtwError::NonFinite(i));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

pub const DEFAULT_STRETCH: f64 = 1.5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WarpConfig {
    /// Sakoe-Chiba band half-width.
    pub window: usize,
    /// Largest normalized distance accepted as a hit.
    pub threshold: f64,
    /// Candidate windows range from `m / stretch` to `m * stretch` values.
    pub stretch: f64,
    pub metric: Metric,
    /// Z-normalize the template and every candidate window before aligning.
    pub znormalize: bool,
}

impl WarpConfig {
    pub fn new(window: usize, threshold: f64) -> Result<Self, DtwError> {
        let cfg =
            Self { window, threshold, stretch: DEFAULT_STRETCH, metric: Metric::Absolute, znormalize: false };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), DtwError> {
        if self.window == 0 {
            return Err(DtwError::Config("window must be at least 1"));
        }
        if !(self.threshold >= 0.0 && self.threshold.is_finite()) {
            return Err(DtwError::Config("threshold must be a finite non-negative number"));
        }
        if !(self.stretch >= 1.0 && self.stretch.is_finite()) {
            return Err(DtwError::Config("stretch must be a finite number >= 1"));
        }
        Ok(())
    }

    /// Candidate window lengths for a template of length `m`: within the
    /// stretch bounds and alignable under the warping window.
    pub fn candidate_lengths(&self, m: usize) -> std::ops::RangeInclusive<usize> {
        let by_stretch_lo = (m as f64 / self.stretch).ceil() as usize;
        let by_stretch_hi = (m as f64 * self.stretch).floor() as usize;
        let lo = by_stretch_lo.max(m.saturating_sub(self.window)).max(1);
        let hi = by_stretch_hi.min(m + self.window);
        lo..=hi
    }
}

/// A candidate window within the threshold.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hit {
    pub start: usize,
    /// Inclusive.
    pub end: usize,
    pub score: f64,
}

/// A maximal run of overlapping hits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Match<T> {
    pub start_index: usize,
    pub end_index: usize,
    /// Lowest normalized distance among the merged hits.
    pub score: f64,
    pub start: T,
    pub end: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchWarning {
    /// Even the most compressed candidate is longer than the series.
    TemplateLongerThanSeries,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatchOutcome<T> {
    pub matches: Vec<Match<T>>,
    pub warning: Option<MatchWarning>,
}

fn znormalized(values: &[f64]) -> Vec<f64> {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let sd = var.sqrt();
    if sd == 0.0 {
        return vec![0.0; values.len()];
    }
    values.iter().map(|v| (v - mean) / sd).collect()
}

/// Every candidate window whose normalized distance to the template is at
/// most the threshold, ordered by start then length.
pub fn scan_candidates(values: &[f64], template: &Template, cfg: &WarpConfig) -> Vec<Hit> {
    let tpl = if cfg.znormalize { znormalized(template.values()) } else { template.values().to_vec() };
    let lengths = cfg.candidate_lengths(tpl.len());
    let mut hits = Vec::new();
    for start in 0..values.len() {
        for len in lengths.clone() {
            if start + len > values.len() {
                break;
            }
            let window = &values[start..start + len];
            let normalized_window;
            let candidate = if cfg.znormalize {
                normalized_window = znormalized(window);
                &normalized_window[..]
            } else {
                window
            };
            let cost = dtw_distance_with(candidate, &tpl, cfg.window, cfg.metric)
                .expect("candidate lengths are window-feasible");
            let score = cost.normalized();
            if score <= cfg.threshold {
                hits.push(Hit { start, end: start + len - 1, score });
            }
        }
    }
    hits
}

/// Merges hits sharing at least one index into maximal runs.
pub fn merge_hits(hits: &[Hit]) -> Vec<Hit> {
    let mut sorted = hits.to_vec();
    sorted.sort_by_key(|h| (h.start, h.end));
    let mut merged: Vec<Hit> = Vec::new();
    for h in sorted {
        match merged.last_mut() {
            Some(last) if h.start <= last.end => {
                last.end = last.end.max(h.end);
                last.score = last.score.min(h.score);
            }
            _ => merged.push(h),
        }
    }
    merged
}

/// Finds the intervals of `series` where `template` approximately occurs.
pub fn find_matches<T: Copy + Ord>(
    series: &Series<T>,
    template: &Template,
    cfg: &WarpConfig,
) -> Result<MatchOutcome<T>, DtwError> {
    cfg.validate()?;
    let shortest = *cfg.candidate_lengths(template.len()).start();
    if shortest > series.len() {
        return Ok(MatchOutcome {
            matches: Vec::new(),
            warning: Some(MatchWarning::TemplateLongerThanSeries),
        });
    }
    let ts = series.timestamps();
    let matches = merge_hits(&scan_candidates(series.values(), template, cfg))
        .into_iter()
        .map(|h| Match {
            start_index: h.start,
            end_index: h.end,
            score: h.score,
            start: ts[h.start],
            end: ts[h.end],
        })
        .collect();
    Ok(MatchOutcome { matches, warning: None })
}

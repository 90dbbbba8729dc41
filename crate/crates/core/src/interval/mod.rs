//! Occurrence function of a set of time intervals.
//!
//! The occurrence function `occ(t)` counts the input intervals containing `t`.
//! It is piecewise constant between consecutive endpoints, and at an endpoint
//! `t` its value and right-hand limit differ from the left-hand limit by
//!
//! ```text
//! occ(t) - L = n2 - n3
//! R - L      = n1 + n2 - n3 - n4
//! ```
//!
//! where `n1..n4` count the left-open, left-closed, right-open and
//! right-closed endpoints located at `t`. Sweeping the sorted endpoints with
//! these identities yields one [`ChangeRecord`] per change of the function,
//! which supports `O(log m)` point queries. The change records are further
//! flattened into [`KnotRecord`]s, one per step of the function, and scanned
//! for hills ([`LocalMaximum`]).
//!
//! Both a discrete axis (`i64` ticks) and a continuous axis ([`Real`]) are
//! supported through the [`Timestamp`] trait.

mod maxima;
mod occurrence;
mod sort;

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use maxima::{build_knot_records, find_local_maxima, KnotRecord, LocalMaximum};
pub use occurrence::{build_change_records, occurrence_at, ChangeRecord, OccurrenceFunction};
pub use sort::{radix_sort_i64_endpoints, sort_endpoints};

/// Kind of time axis an interval set lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeAxis {
    Discrete,
    Continuous,
}

/// A point on a time axis.
///
/// Discrete axes step in units of one tick; on a continuous axis the step
/// functions are the identity.
pub trait Timestamp: Copy + Ord + fmt::Debug + Send + Sync + 'static {
    const AXIS: TimeAxis;

    /// Next tick on a discrete axis, `self` on a continuous one.
    fn step_forward(self) -> Self;

    /// Previous tick on a discrete axis, `self` on a continuous one.
    fn step_back(self) -> Self;

    /// Whether `self` is far enough from the representable range that both
    /// steps are defined.
    fn in_range(self) -> bool;

    /// Sorts endpoint records ascending by `(t, kind)`. Stable.
    fn sort_records(records: &mut [EndpointRecord<Self>]) {
        records.sort();
    }
}

impl Timestamp for i64 {
    const AXIS: TimeAxis = TimeAxis::Discrete;

    fn step_forward(self) -> Self {
        self + 1
    }

    fn step_back(self) -> Self {
        self - 1
    }

    fn in_range(self) -> bool {
        self > i64::MIN && self < i64::MAX
    }

    fn sort_records(records: &mut [EndpointRecord<Self>]) {
        radix_sort_i64_endpoints(records);
    }
}

/// A finite real timestamp with a total order.
///
/// `-0.0` is folded into `0.0` so that coincidence is bit equality.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Real(f64);

impl Real {
    pub fn new(value: f64) -> Result<Self, IntervalError> {
        if !value.is_finite() {
            return Err(IntervalError::NonFinite(value));
        }
        Ok(Real(if value == 0.0 { 0.0 } else { value }))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Real {
    type Error = IntervalError;

    fn try_from(value: f64) -> Result<Self, Self::Error> {
        Real::new(value)
    }
}

impl From<Real> for f64 {
    fn from(value: Real) -> Self {
        value.0
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Real {}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Real {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Timestamp for Real {
    const AXIS: TimeAxis = TimeAxis::Continuous;

    fn step_forward(self) -> Self {
        self
    }

    fn step_back(self) -> Self {
        self
    }

    fn in_range(self) -> bool {
        true
    }
}

/// Whether an interval endpoint belongs to the interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    Open,
    Closed,
}

/// A time span `lo..hi` with independently open or closed ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interval<T> {
    pub lo: T,
    pub hi: T,
    pub lo_kind: Bound,
    pub hi_kind: Bound,
}

/// Why an interval was rejected.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Error)]
pub enum InvalidInterval {
    #[error("lower endpoint exceeds upper endpoint")]
    Reversed,
    #[error("empty interval")]
    Empty,
    #[error("open endpoint on a discrete axis")]
    OpenDiscrete,
    #[error("endpoint at the edge of the representable range")]
    OutOfRange,
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum IntervalError {
    #[error("interval {index} is invalid: {reason}")]
    Invalid { index: usize, reason: InvalidInterval },
    #[error("timestamp {0} is not finite")]
    NonFinite(f64),
    #[error("endpoint records are not sorted at position {index}")]
    Unsorted { index: usize },
    #[error("occurrence count becomes negative at endpoint position {index}")]
    NegativeCount { index: usize },
    #[error("left and right endpoint counts differ ({left} left, {right} right)")]
    Unbalanced { left: usize, right: usize },
}

impl<T: Timestamp> Interval<T> {
    /// Builds an interval, canonicalizing open discrete endpoints by moving
    /// them one tick inward.
    pub fn new(lo: T, lo_kind: Bound, hi: T, hi_kind: Bound) -> Result<Self, InvalidInterval> {
        let mut iv = Interval { lo, hi, lo_kind, hi_kind };
        if T::AXIS == TimeAxis::Discrete {
            if !lo.in_range() || !hi.in_range() {
                return Err(InvalidInterval::OutOfRange);
            }
            if lo_kind == Bound::Open {
                iv.lo = lo.step_forward();
                iv.lo_kind = Bound::Closed;
            }
            if hi_kind == Bound::Open {
                iv.hi = hi.step_back();
                iv.hi_kind = Bound::Closed;
            }
            if iv.lo > iv.hi && lo <= hi {
                return Err(InvalidInterval::Empty);
            }
        }
        iv.validate()?;
        Ok(iv)
    }

    pub fn closed(lo: T, hi: T) -> Result<Self, InvalidInterval> {
        Self::new(lo, Bound::Closed, hi, Bound::Closed)
    }

    pub fn open(lo: T, hi: T) -> Result<Self, InvalidInterval> {
        Self::new(lo, Bound::Open, hi, Bound::Open)
    }

    /// `[lo, hi)`
    pub fn closed_open(lo: T, hi: T) -> Result<Self, InvalidInterval> {
        Self::new(lo, Bound::Closed, hi, Bound::Open)
    }

    /// `(lo, hi]`
    pub fn open_closed(lo: T, hi: T) -> Result<Self, InvalidInterval> {
        Self::new(lo, Bound::Open, hi, Bound::Closed)
    }

    /// Checks the interval invariants without canonicalizing.
    pub fn validate(&self) -> Result<(), InvalidInterval> {
        if T::AXIS == TimeAxis::Discrete {
            if self.lo_kind == Bound::Open || self.hi_kind == Bound::Open {
                return Err(InvalidInterval::OpenDiscrete);
            }
            if !self.lo.in_range() || !self.hi.in_range() {
                return Err(InvalidInterval::OutOfRange);
            }
        }
        match self.lo.cmp(&self.hi) {
            Ordering::Less => Ok(()),
            Ordering::Equal if self.lo_kind == Bound::Closed && self.hi_kind == Bound::Closed => Ok(()),
            Ordering::Equal => Err(InvalidInterval::Empty),
            Ordering::Greater => Err(InvalidInterval::Reversed),
        }
    }

    pub fn contains(&self, t: T) -> bool {
        let above = match self.lo_kind {
            Bound::Closed => t >= self.lo,
            Bound::Open => t > self.lo,
        };
        let below = match self.hi_kind {
            Bound::Closed => t <= self.hi,
            Bound::Open => t < self.hi,
        };
        above && below
    }

    /// The two endpoint records of this interval.
    pub fn endpoints(&self) -> [EndpointRecord<T>; 2] {
        let left = match self.lo_kind {
            Bound::Closed => EndpointKind::LeftClosed,
            Bound::Open => EndpointKind::LeftOpen,
        };
        let right = match self.hi_kind {
            Bound::Closed => EndpointKind::RightClosed,
            Bound::Open => EndpointKind::RightOpen,
        };
        [EndpointRecord { t: self.lo, kind: left }, EndpointRecord { t: self.hi, kind: right }]
    }
}

/// Endpoint type. The declaration order is the tiebreak used when several
/// endpoints share a timestamp.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndpointKind {
    LeftClosed,
    LeftOpen,
    RightOpen,
    RightClosed,
}

impl EndpointKind {
    pub fn is_left(self) -> bool {
        matches!(self, EndpointKind::LeftClosed | EndpointKind::LeftOpen)
    }

    pub(crate) fn rank(self) -> usize {
        self as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EndpointRecord<T> {
    pub t: T,
    pub kind: EndpointKind,
}

//! Calendar-based periodicity mining for interval-based temporal patterns.
//!
//! - [`interval`]: occurrence function of an interval set, point queries and
//!   hill detection on discrete or continuous axes.
//! - [`calendar`]: cycle splitting, stripping and full/partial periodicity
//!   mining at yearly, monthly, daily or hourly level.
//! - [`dtw`]: windowed dynamic time warping and template search that turns a
//!   raw series into pattern intervals.
//! - [`hierarchy`]: bounds on the periodicities a fine-level pattern induces
//!   at a coarser level of a time hierarchy.

pub mod calendar;
pub mod dtw;
pub mod hierarchy;
pub mod interval;

pub use calendar::{
    lifespan_cycles, merge_overlapping, mine_periodicities, split_by_cycle, strip, CalendarError,
    CalendarInterval, CalendarStamp, CycleAxis, PeriodLevel, Periodicity, PeriodicityReport, Resolution,
    StrippedStamp,
};
pub use dtw::{
    dtw_distance, dtw_distance_with, find_matches, DtwCost, DtwError, Match, MatchOutcome, MatchWarning,
    Metric, Series, Template, WarpConfig,
};
pub use hierarchy::{
    derived_pattern_bounds, tight_assignment, verify_bounds_by_enumeration, BoundCheck, DerivedBounds,
    HierarchyError, HierarchySpec, Rational,
};
pub use interval::{
    build_change_records, build_knot_records, find_local_maxima, occurrence_at, sort_endpoints, Bound,
    ChangeRecord, EndpointKind, EndpointRecord, Interval, IntervalError, KnotRecord, LocalMaximum,
    OccurrenceFunction, Real, TimeAxis, Timestamp,
};

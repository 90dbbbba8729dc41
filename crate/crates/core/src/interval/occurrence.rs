use serde::{Deserialize, Serialize};

use super::{
    build_knot_records, find_local_maxima, sort_endpoints, EndpointKind, EndpointRecord, Interval,
    IntervalError, KnotRecord, LocalMaximum, TimeAxis, Timestamp,
};

/// One change of the occurrence function.
///
/// `u` is the value at `t`. `r` is the right-hand limit at `t` on a
/// continuous axis and the value at `t + 1` on a discrete axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChangeRecord<T> {
    pub t: T,
    pub u: usize,
    pub r: usize,
}

/// Sweeps sorted endpoint records and emits one [`ChangeRecord`] per
/// timestamp at which the occurrence function changes.
///
/// All endpoints sharing a timestamp are aggregated before anything is
/// emitted, so the order among equal timestamps does not matter. On a
/// discrete axis the right-hand limit of a record is replaced by the value
/// of the next record whenever that record sits exactly one tick later.
pub fn build_change_records<T: Timestamp>(
    endpoints: &[EndpointRecord<T>],
) -> Result<Vec<ChangeRecord<T>>, IntervalError> {
    let mut changes: Vec<ChangeRecord<T>> = Vec::new();
    let (mut lefts, mut rights) = (0usize, 0usize);
    // Left-hand limit at the current timestamp.
    let mut limit: i64 = 0;
    let mut i = 0;

    while i < endpoints.len() {
        let ct = endpoints[i].t;
        let group_start = i;
        let (mut n1, mut n2, mut n3, mut n4) = (0i64, 0i64, 0i64, 0i64);
        while i < endpoints.len() && endpoints[i].t == ct {
            match endpoints[i].kind {
                EndpointKind::LeftOpen => n1 += 1,
                EndpointKind::LeftClosed => n2 += 1,
                EndpointKind::RightOpen => n3 += 1,
                EndpointKind::RightClosed => n4 += 1,
            }
            i += 1;
        }
        if i < endpoints.len() && endpoints[i].t < ct {
            return Err(IntervalError::Unsorted { index: i });
        }
        lefts += (n1 + n2) as usize;
        rights += (n3 + n4) as usize;

        let at = n2 - n3;
        let right = n1 + n2 - n3 - n4;
        if at != 0 || right != 0 {
            let u = limit + at;
            let r = limit + right;
            if u < 0 || r < 0 {
                return Err(IntervalError::NegativeCount { index: group_start });
            }
            changes.push(ChangeRecord { t: ct, u: u as usize, r: r as usize });
            limit = r;
        }
    }

    if lefts != rights || limit != 0 {
        return Err(IntervalError::Unbalanced { left: lefts, right: rights });
    }

    if T::AXIS == TimeAxis::Discrete {
        for i in 1..changes.len() {
            if changes[i].t == changes[i - 1].t.step_forward() {
                changes[i - 1].r = changes[i].u;
            }
        }
    }

    Ok(changes)
}

/// Value of the occurrence function at `s`, by binary search over the
/// change records.
pub fn occurrence_at<T: Timestamp>(changes: &[ChangeRecord<T>], s: T) -> usize {
    match changes.binary_search_by(|d| d.t.cmp(&s)) {
        Ok(i) => changes[i].u,
        // s precedes the first change, or follows the last.
        Err(0) => 0,
        Err(i) if i == changes.len() => 0,
        Err(i) => changes[i - 1].r,
    }
}

/// The occurrence function of an interval set, held as its change records.
///
/// Point queries go through the change records only; knot records drop the
/// value at a change timestamp when it equals the preceding step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OccurrenceFunction<T> {
    changes: Vec<ChangeRecord<T>>,
}

impl<T: Timestamp> OccurrenceFunction<T> {
    pub fn from_intervals(intervals: &[Interval<T>]) -> Result<Self, IntervalError> {
        let endpoints = sort_endpoints(intervals)?;
        let changes = build_change_records(&endpoints)?;
        Ok(Self { changes })
    }

    pub fn changes(&self) -> &[ChangeRecord<T>] {
        &self.changes
    }

    pub fn into_changes(self) -> Vec<ChangeRecord<T>> {
        self.changes
    }

    pub fn is_empty(&self) -> bool {
        self.changes.is_empty()
    }

    pub fn at(&self, s: T) -> usize {
        occurrence_at(&self.changes, s)
    }

    pub fn knots(&self) -> Vec<KnotRecord<T>> {
        build_knot_records(&self.changes)
    }

    pub fn local_maxima(&self) -> Vec<LocalMaximum<T>> {
        find_local_maxima(&self.knots())
    }

    /// Largest value the function takes anywhere.
    pub fn max_value(&self) -> usize {
        self.changes.iter().map(|d| d.u.max(d.r)).max().unwrap_or(0)
    }
}

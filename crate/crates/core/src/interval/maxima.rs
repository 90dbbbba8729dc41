use serde::{Deserialize, Serialize};

use super::{ChangeRecord, TimeAxis, Timestamp};

/// A single step of the occurrence function: from `t` on it takes value `v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnotRecord<T> {
    pub t: T,
    pub v: usize,
}

/// One hill of the occurrence function.
///
/// The function rises from `startval` at `start` to a plateau of height
/// `peakval` spanning `peakstart..=peakend`, then falls to `endval` at `end`.
/// On a continuous axis the plateau bounds are the closure of the region
/// where the peak value is taken.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalMaximum<T> {
    pub start: T,
    pub startval: usize,
    pub peakstart: T,
    pub peakend: T,
    pub peakval: usize,
    pub end: T,
    pub endval: usize,
}

/// Flattens change records into knots, two per record at most: `(t, u)`
/// followed by `(t, r)` on a continuous axis or `(t + 1, r)` on a discrete
/// one. A knot repeating the previous knot's value is dropped; the function
/// is zero before the first record, so a leading zero knot is dropped too.
pub fn build_knot_records<T: Timestamp>(changes: &[ChangeRecord<T>]) -> Vec<KnotRecord<T>> {
    let mut knots = Vec::with_capacity(changes.len() * 2);
    let mut last = 0usize;
    let mut push = |knots: &mut Vec<KnotRecord<T>>, t: T, v: usize| {
        if v != last {
            knots.push(KnotRecord { t, v });
            last = v;
        }
    };
    for d in changes {
        push(&mut knots, d.t, d.u);
        let next = match T::AXIS {
            TimeAxis::Continuous => d.t,
            TimeAxis::Discrete => d.t.step_forward(),
        };
        push(&mut knots, next, d.r);
    }
    knots
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Slope {
    Increasing,
    Decreasing,
}

/// Scans knots left to right and reports every hill.
///
/// A hill opens at the first knot or right after a valley, peaks where the
/// next knot drops below the current one, and closes at the next knot that is
/// followed by a rise, or at the last knot.
pub fn find_local_maxima<T: Timestamp>(knots: &[KnotRecord<T>]) -> Vec<LocalMaximum<T>> {
    let p = knots.len();
    let mut hills = Vec::new();
    if p == 0 {
        return hills;
    }
    let discrete = T::AXIS == TimeAxis::Discrete;
    let step_back = |t: T| if discrete { t.step_back() } else { t };

    let mut state = Slope::Increasing;
    let mut current = LocalMaximum {
        start: step_back(knots[0].t),
        startval: 0,
        peakstart: knots[0].t,
        peakend: knots[0].t,
        peakval: 0,
        end: knots[0].t,
        endval: 0,
    };

    for i in 0..p {
        let next = knots.get(i + 1);
        if state == Slope::Increasing {
            if let Some(next) = next.filter(|n| n.v < knots[i].v) {
                current.peakstart = knots[i].t;
                current.peakend = step_back(next.t);
                current.peakval = knots[i].v;
                state = Slope::Decreasing;
            }
        }
        if state == Slope::Decreasing && next.is_none_or(|n| n.v > knots[i].v) {
            current.end = knots[i].t;
            current.endval = knots[i].v;
            hills.push(current);
            if let Some(next) = next {
                current = LocalMaximum {
                    start: step_back(next.t),
                    startval: knots[i].v,
                    peakstart: next.t,
                    peakend: next.t,
                    peakval: 0,
                    end: next.t,
                    endval: 0,
                };
                state = Slope::Increasing;
            }
        }
    }

    // Only reachable when the last knot is not a drop, which well-formed
    // knots never produce: close the open hill on the last knot.
    if state == Slope::Increasing {
        let last = knots[p - 1];
        if last.v > current.startval {
            current.peakstart = last.t;
            current.peakend = last.t;
            current.peakval = last.v;
            current.end = last.t;
            current.endval = 0;
            hills.push(current);
        }
    }

    hills
}

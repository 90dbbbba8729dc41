//! Brute-force oracles shared by the integration and acceptance tests.
//!
//! Nothing here calls into the sweep, the knot scan or the DTW recurrence of
//! the library; every expected value is recomputed from first principles.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use calper_core::{
    Bound, CalendarInterval, ChangeRecord, CycleAxis, EndpointKind, Interval, KnotRecord, LocalMaximum, Real,
    Timestamp,
};
use chrono::{Datelike, NaiveDate};
use rand::Rng;

pub fn real(x: f64) -> Real {
    Real::new(x).unwrap()
}

/// Number of intervals containing `t`.
pub fn brute_count<T: Timestamp>(intervals: &[Interval<T>], t: T) -> usize {
    intervals.iter().filter(|iv| iv.contains(t)).count()
}

/// Random closed discrete intervals.
pub fn random_discrete(rng: &mut impl Rng, n: usize, span: i64) -> Vec<Interval<i64>> {
    (0..n)
        .map(|_| {
            let lo = rng.gen_range(0..span);
            let len = rng.gen_range(0..=span / 8);
            // Some intervals arrive with open ends and get canonicalized.
            let lo_kind = if rng.gen_bool(0.2) { Bound::Open } else { Bound::Closed };
            let hi_kind = if rng.gen_bool(0.2) { Bound::Open } else { Bound::Closed };
            let (lo_raw, hi_raw) = match (lo_kind, hi_kind) {
                (Bound::Open, Bound::Open) => (lo - 1, lo + len + 1),
                (Bound::Open, _) => (lo - 1, lo + len),
                (_, Bound::Open) => (lo, lo + len + 1),
                _ => (lo, lo + len),
            };
            Interval::new(lo_raw, lo_kind, hi_raw, hi_kind).unwrap()
        })
        .collect()
}

/// Random continuous intervals with mixed endpoint kinds. Endpoints sit on a
/// half-unit grid so that coincident endpoints are common.
pub fn random_continuous(rng: &mut impl Rng, n: usize, span: i64) -> Vec<Interval<Real>> {
    let kinds = [Bound::Open, Bound::Closed];
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let a = rng.gen_range(0..2 * span) as f64 / 2.0;
        let len = rng.gen_range(0..=span / 4) as f64 / 2.0;
        let lk = kinds[rng.gen_range(0..2)];
        let hk = kinds[rng.gen_range(0..2)];
        if let Ok(iv) = Interval::new(real(a), lk, real(a + len), hk) {
            out.push(iv);
        }
    }
    out
}

fn distinct_endpoints<T: Timestamp>(intervals: &[Interval<T>]) -> Vec<T> {
    let set: BTreeSet<T> = intervals.iter().flat_map(|iv| [iv.lo, iv.hi]).collect();
    set.into_iter().collect()
}

/// Probe points for a continuous instance: every endpoint, every midpoint
/// between consecutive endpoints, points outside the range, and uniform
/// random fill up to `count`.
pub fn continuous_probes(rng: &mut impl Rng, intervals: &[Interval<Real>], count: usize) -> Vec<Real> {
    let ends: Vec<f64> = distinct_endpoints(intervals).iter().map(|t| t.get()).collect();
    let mut probes: Vec<f64> = Vec::with_capacity(count);
    if let (Some(&first), Some(&last)) = (ends.first(), ends.last()) {
        probes.push(first - 1.0);
        probes.push(last + 1.0);
        for w in ends.windows(2) {
            probes.push((w[0] + w[1]) / 2.0);
        }
        probes.extend(&ends);
        while probes.len() < count {
            probes.push(rng.gen_range(first - 2.0..last + 2.0));
        }
    }
    probes.truncate(count.max(1));
    probes.into_iter().map(real).collect()
}

pub fn discrete_probes(rng: &mut impl Rng, intervals: &[Interval<i64>], count: usize) -> Vec<i64> {
    let ends = distinct_endpoints(intervals);
    let mut probes = Vec::with_capacity(count);
    if let (Some(&first), Some(&last)) = (ends.first(), ends.last()) {
        for &e in &ends {
            probes.extend([e - 1, e, e + 1]);
        }
        while probes.len() < count {
            probes.push(rng.gen_range(first - 3..=last + 3));
        }
    }
    probes.truncate(count.max(1));
    probes
}

/// Lifts discrete intervals to their continuous extension.
pub fn lift(intervals: &[Interval<i64>]) -> Vec<Interval<Real>> {
    intervals.iter().map(|iv| Interval::closed(real(iv.lo as f64), real(iv.hi as f64)).unwrap()).collect()
}

/// Piecewise constancy: between consecutive change records every sampled
/// point carries the left record's `r`.
pub fn check_piecewise_constant_continuous(
    intervals: &[Interval<Real>],
    changes: &[ChangeRecord<Real>],
) -> Result<(), String> {
    for w in changes.windows(2) {
        let (a, b) = (w[0].t.get(), w[1].t.get());
        for frac in [0.25, 0.5, 0.75] {
            let x = real(a + (b - a) * frac);
            let got = brute_count(intervals, x);
            if got != w[0].r {
                return Err(format!("occ({}) = {got}, record ({a}, r={}) says otherwise", x, w[0].r));
            }
        }
    }
    Ok(())
}

pub fn check_piecewise_constant_discrete(
    intervals: &[Interval<i64>],
    changes: &[ChangeRecord<i64>],
) -> Result<(), String> {
    for w in changes.windows(2) {
        for x in (w[0].t + 1)..w[1].t {
            let got = brute_count(intervals, x);
            if got != w[0].r {
                return Err(format!("occ({x}) = {got}, record at {} has r={}", w[0].t, w[0].r));
            }
        }
    }
    Ok(())
}

/// Jump identities at every endpoint timestamp, with the one-sided limits
/// read off brute-force counts at neighbouring midpoints.
pub fn check_jump_identities(intervals: &[Interval<Real>]) -> Result<(), String> {
    let ends: Vec<f64> = distinct_endpoints(intervals).iter().map(|t| t.get()).collect();
    let mut kinds: HashMap<u64, [i64; 4]> = HashMap::new();
    for iv in intervals {
        for e in iv.endpoints() {
            let slot = match e.kind {
                EndpointKind::LeftOpen => 0,
                EndpointKind::LeftClosed => 1,
                EndpointKind::RightOpen => 2,
                EndpointKind::RightClosed => 3,
            };
            kinds.entry(e.t.get().to_bits()).or_default()[slot] += 1;
        }
    }
    for (i, &t) in ends.iter().enumerate() {
        let before = if i == 0 { t - 1.0 } else { (ends[i - 1] + t) / 2.0 };
        let after = if i + 1 == ends.len() { t + 1.0 } else { (t + ends[i + 1]) / 2.0 };
        let left = brute_count(intervals, real(before)) as i64;
        let right = brute_count(intervals, real(after)) as i64;
        let at = brute_count(intervals, real(t)) as i64;
        let [n1, n2, n3, n4] = kinds[&t.to_bits()];
        if at - left != n2 - n3 {
            return Err(format!("at t={t}: occ(t) - L = {} but n2 - n3 = {}", at - left, n2 - n3));
        }
        if right - left != n1 + n2 - n3 - n4 {
            return Err(format!(
                "at t={t}: R - L = {} but n1 + n2 - n3 - n4 = {}",
                right - left,
                n1 + n2 - n3 - n4
            ));
        }
    }
    Ok(())
}

/// Strict local-maximum plateaus of a sampled value sequence.
fn count_plateau_peaks(values: &[usize]) -> usize {
    let mut runs: Vec<usize> = values.to_vec();
    runs.dedup();
    (0..runs.len())
        .filter(|&i| {
            let l = if i == 0 { 0 } else { runs[i - 1] };
            let r = if i + 1 == runs.len() { 0 } else { runs[i + 1] };
            runs[i] > l && runs[i] > r
        })
        .count()
}

/// Every hill's peak is the brute-force maximum over its span and is taken
/// exactly on its plateau; the number of hills equals the number of strict
/// local-maximum plateaus of the function.
pub fn check_maxima_discrete(intervals: &[Interval<i64>], hills: &[LocalMaximum<i64>]) -> Result<(), String> {
    for h in hills {
        if !(h.start <= h.peakstart && h.peakstart <= h.peakend && h.peakend <= h.end) {
            return Err(format!("hill out of order: {h:?}"));
        }
        if !(h.startval < h.peakval && h.endval < h.peakval) {
            return Err(format!("not a strict hill: {h:?}"));
        }
        let mut max = 0;
        for t in h.start..=h.end {
            let v = brute_count(intervals, t);
            max = max.max(v);
            let on_plateau = h.peakstart <= t && t <= h.peakend;
            if on_plateau != (v == h.peakval) {
                return Err(format!("occ({t}) = {v} disagrees with plateau of {h:?}"));
            }
        }
        if max != h.peakval {
            return Err(format!("max {max} over span differs from peak of {h:?}"));
        }
        if brute_count(intervals, h.start) != h.startval || brute_count(intervals, h.end) != h.endval {
            return Err(format!("boundary values wrong for {h:?}"));
        }
    }
    let ends = distinct_endpoints(intervals);
    if let (Some(&lo), Some(&hi)) = (ends.first(), ends.last()) {
        let values: Vec<usize> = (lo - 1..=hi + 1).map(|t| brute_count(intervals, t)).collect();
        let expected = count_plateau_peaks(&values);
        if expected != hills.len() {
            return Err(format!("{} hills reported, {expected} peaks in the function", hills.len()));
        }
    }
    Ok(())
}

pub fn check_maxima_continuous(
    intervals: &[Interval<Real>],
    hills: &[LocalMaximum<Real>],
) -> Result<(), String> {
    let ends: Vec<f64> = distinct_endpoints(intervals).iter().map(|t| t.get()).collect();
    // Sample grid: each endpoint and the midpoints around it.
    let mut grid: Vec<f64> = Vec::new();
    if let (Some(&first), Some(&last)) = (ends.first(), ends.last()) {
        grid.push(first - 1.0);
        for (i, &e) in ends.iter().enumerate() {
            grid.push(e);
            grid.push(if i + 1 < ends.len() { (e + ends[i + 1]) / 2.0 } else { last + 1.0 });
        }
    }
    for h in hills {
        let (s, ps, pe, e) = (h.start.get(), h.peakstart.get(), h.peakend.get(), h.end.get());
        if !(s <= ps && ps <= pe && pe <= e) {
            return Err(format!("hill out of order: {h:?}"));
        }
        if !(h.startval < h.peakval && h.endval < h.peakval) {
            return Err(format!("not a strict hill: {h:?}"));
        }
        let mut max = 0;
        for &x in grid.iter().filter(|&&x| s <= x && x <= e) {
            let v = brute_count(intervals, real(x));
            max = max.max(v);
            if ps < x && x < pe && v != h.peakval {
                return Err(format!("occ({x}) = {v} inside plateau of {h:?}"));
            }
            if (x < ps || x > pe) && v >= h.peakval {
                return Err(format!("occ({x}) = {v} outside plateau reaches peak of {h:?}"));
            }
        }
        if ps == pe && brute_count(intervals, h.peakstart) != h.peakval {
            return Err(format!("point peak not attained for {h:?}"));
        }
        if max != h.peakval {
            return Err(format!("max {max} over span differs from peak of {h:?}"));
        }
    }
    let values: Vec<usize> = grid.iter().map(|&x| brute_count(intervals, real(x))).collect();
    let expected = count_plateau_peaks(&values);
    if expected != hills.len() {
        return Err(format!("{} hills reported, {expected} peaks in the function", hills.len()));
    }
    Ok(())
}

/// Consecutive knots carry distinct values and never go back in time.
pub fn check_knots<T: Timestamp>(knots: &[KnotRecord<T>]) -> Result<(), String> {
    for w in knots.windows(2) {
        if w[1].t < w[0].t || w[1].v == w[0].v {
            return Err(format!("bad knot pair {:?} {:?}", w[0], w[1]));
        }
    }
    Ok(())
}

/// Minimal warping cost over every admissible path, enumerated one path at
/// a time.
pub fn dtw_by_enumeration(a: &[f64], b: &[f64], w: usize) -> Option<f64> {
    fn walk(a: &[f64], b: &[f64], w: usize, i: usize, j: usize, acc: f64, best: &mut Option<f64>) {
        if i.abs_diff(j) > w {
            return;
        }
        let acc = acc + (a[i] - b[j]).abs();
        if i + 1 == a.len() && j + 1 == b.len() {
            *best = Some(best.map_or(acc, |x: f64| x.min(acc)));
            return;
        }
        if i + 1 < a.len() && j + 1 < b.len() {
            walk(a, b, w, i + 1, j + 1, acc, best);
        }
        if i + 1 < a.len() {
            walk(a, b, w, i + 1, j, acc, best);
        }
        if j + 1 < b.len() {
            walk(a, b, w, i, j + 1, acc, best);
        }
    }
    let mut best = None;
    walk(a, b, w, 0, 0, 0.0, &mut best);
    best
}

/// Lengths, in grid points, of every minimal-cost admissible path.
#[allow(clippy::too_many_arguments)]
pub fn optimal_path_lengths(a: &[f64], b: &[f64], w: usize) -> BTreeSet<usize> {
    fn walk(
        a: &[f64],
        b: &[f64],
        w: usize,
        i: usize,
        j: usize,
        acc: f64,
        len: usize,
        out: &mut Vec<(f64, usize)>,
    ) {
        if i.abs_diff(j) > w {
            return;
        }
        let acc = acc + (a[i] - b[j]).abs();
        let len = len + 1;
        if i + 1 == a.len() && j + 1 == b.len() {
            out.push((acc, len));
            return;
        }
        if i + 1 < a.len() && j + 1 < b.len() {
            walk(a, b, w, i + 1, j + 1, acc, len, out);
        }
        if i + 1 < a.len() {
            walk(a, b, w, i + 1, j, acc, len, out);
        }
        if j + 1 < b.len() {
            walk(a, b, w, i, j + 1, acc, len, out);
        }
    }
    let mut paths = Vec::new();
    walk(a, b, w, 0, 0, 0.0, 0, &mut paths);
    let best = paths.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    paths.into_iter().filter(|p| p.0 == best).map(|p| p.1).collect()
}

/// Minimal warping cost by memoized recursion from each cell to the end of
/// the grid. Polynomial, so usable on longer sequences than enumeration.
pub fn dtw_by_forward_memo(a: &[f64], b: &[f64], w: usize) -> Option<f64> {
    fn go(
        a: &[f64],
        b: &[f64],
        w: usize,
        i: usize,
        j: usize,
        memo: &mut HashMap<(usize, usize), Option<f64>>,
    ) -> Option<f64> {
        if i.abs_diff(j) > w {
            return None;
        }
        if let Some(&v) = memo.get(&(i, j)) {
            return v;
        }
        let here = (a[i] - b[j]).abs();
        let v = if i + 1 == a.len() && j + 1 == b.len() {
            Some(here)
        } else {
            let mut best: Option<f64> = None;
            for (di, dj) in [(1, 1), (1, 0), (0, 1)] {
                if i + di < a.len() && j + dj < b.len() {
                    if let Some(c) = go(a, b, w, i + di, j + dj, memo) {
                        best = Some(best.map_or(c, |x| x.min(c)));
                    }
                }
            }
            best.map(|c| c + here)
        };
        memo.insert((i, j), v);
        v
    }
    go(a, b, w, 0, 0, &mut HashMap::new())
}

/// Windows `[start, end]` of `values` that align with `template` at zero
/// cost, scanning every candidate length allowed by `stretch` and `w`.
pub fn zero_cost_windows(values: &[f64], template: &[f64], w: usize, stretch: f64) -> Vec<(usize, usize)> {
    let m = template.len();
    let lo = ((m as f64 / stretch).ceil() as usize).max(1);
    let hi = (m as f64 * stretch).floor() as usize;
    let mut out = Vec::new();
    for start in 0..values.len() {
        for len in lo..=hi {
            if start + len > values.len() || len.abs_diff(m) > w {
                continue;
            }
            if dtw_by_forward_memo(&values[start..start + len], template, w) == Some(0.0) {
                out.push((start, start + len - 1));
            }
        }
    }
    out
}

/// Merges index windows sharing an index.
pub fn merge_index_windows(mut windows: Vec<(usize, usize)>) -> Vec<(usize, usize)> {
    windows.sort();
    let mut out: Vec<(usize, usize)> = Vec::new();
    for (s, e) in windows {
        match out.last_mut() {
            Some(last) if s <= last.1 => last.1 = last.1.max(e),
            _ => out.push((s, e)),
        }
    }
    out
}

/// Per stripped slot, the number of distinct cycles whose occurrences cover
/// it, computed by walking every covered unit of every occurrence.
///
/// Only day-resolution yearly and monthly axes are supported.
pub fn slot_cycle_counts(intervals: &[CalendarInterval], axis: &CycleAxis) -> BTreeMap<i64, usize> {
    use calper_core::{PeriodLevel, Resolution};
    assert_eq!(axis.resolution(), Resolution::Day);
    let mut per_slot: BTreeMap<i64, BTreeSet<(i32, u32)>> = BTreeMap::new();
    for iv in intervals {
        let mut day = iv.start.date();
        while day <= iv.end.date() {
            let (slot, cycle) = match axis.level() {
                PeriodLevel::Yearly => (day_slot_by_counting(day), (day.year(), 0)),
                PeriodLevel::Monthly => (day.day() as i64, (day.year(), day.month())),
                other => panic!("unsupported level {other}"),
            };
            per_slot.entry(slot).or_default().insert(cycle);
            day = day.succ_opt().unwrap();
        }
    }
    per_slot.into_iter().map(|(k, v)| (k, v.len())).collect()
}

/// Slot of a day in a 366-day year that always has Feb 29, by walking the
/// days of the leap year 2000.
pub fn day_slot_by_counting(day: NaiveDate) -> i64 {
    let mut cur = NaiveDate::from_ymd_opt(2000, 1, 1).unwrap();
    let mut slot = 1;
    while (cur.month(), cur.day()) != (day.month(), day.day()) {
        cur = cur.succ_opt().unwrap();
        slot += 1;
    }
    slot
}

/// Number of calendar years touched by the occurrences.
pub fn years_spanned(intervals: &[CalendarInterval]) -> u64 {
    let first = intervals.iter().map(|iv| iv.start.year()).min().unwrap();
    let last = intervals.iter().map(|iv| iv.end.year()).max().unwrap();
    (last - first + 1) as u64
}

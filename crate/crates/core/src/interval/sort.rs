use super::{EndpointRecord, Interval, IntervalError, Timestamp};

const DIGIT_BITS: u32 = 16;
const BUCKETS: usize = 1 << DIGIT_BITS;

/// Converts intervals to endpoint records sorted ascending by timestamp,
/// ties broken by [`super::EndpointKind`] order.
///
/// Discrete (`i64`) timestamps go through an LSD radix sort; continuous ones
/// use a stable comparison sort.
pub fn sort_endpoints<T: Timestamp>(
    intervals: &[Interval<T>],
) -> Result<Vec<EndpointRecord<T>>, IntervalError> {
    let mut records = Vec::with_capacity(intervals.len() * 2);
    for (index, iv) in intervals.iter().enumerate() {
        iv.validate().map_err(|reason| IntervalError::Invalid { index, reason })?;
        records.extend(iv.endpoints());
    }
    T::sort_records(&mut records);
    Ok(records)
}

/// Stable LSD radix sort of discrete endpoint records by `(t, kind)`.
///
/// One counting pass orders the endpoint kinds, then 16-bit digit passes run
/// over the timestamp from least to most significant. Digits that are equal
/// across every key are skipped, so timestamps confined to a limited range
/// (hierarchical calendar ticks, for instance) need only a couple of passes.
pub fn radix_sort_i64_endpoints(records: &mut [EndpointRecord<i64>]) {
    let n = records.len();
    if n <= 1 {
        return;
    }

    let mut scratch = records.to_vec();

    // Kind pass, scattering into scratch.
    let mut kind_counts = [0usize; 4];
    for r in records.iter() {
        kind_counts[r.kind.rank()] += 1;
    }
    let mut pos = [0usize; 4];
    let mut sum = 0;
    for (p, c) in pos.iter_mut().zip(kind_counts) {
        *p = sum;
        sum += c;
    }
    for r in records.iter() {
        let b = r.kind.rank();
        scratch[pos[b]] = *r;
        pos[b] += 1;
    }

    let key = |t: i64| (t as u64) ^ (1 << 63);
    let first = key(scratch[0].t);
    let varying = scratch.iter().fold(0u64, |acc, r| acc | (key(r.t) ^ first));

    let mut counts = vec![0usize; BUCKETS];
    let mut src_is_scratch = true;
    for pass in 0..(64 / DIGIT_BITS) {
        let shift = pass * DIGIT_BITS;
        if (varying >> shift) & (BUCKETS as u64 - 1) == 0 {
            continue;
        }
        let (src, dst): (&[EndpointRecord<i64>], &mut [EndpointRecord<i64>]) =
            if src_is_scratch { (&scratch, &mut *records) } else { (&*records, &mut scratch) };
        radix_pass(src, dst, shift, &mut counts, key);
        src_is_scratch = !src_is_scratch;
    }

    if src_is_scratch {
        records.copy_from_slice(&scratch);
    }
}

fn radix_pass(
    src: &[EndpointRecord<i64>],
    dst: &mut [EndpointRecord<i64>],
    shift: u32,
    counts: &mut [usize],
    key: impl Fn(i64) -> u64,
) {
    let mask = BUCKETS as u64 - 1;
    counts.fill(0);
    for r in src {
        counts[((key(r.t) >> shift) & mask) as usize] += 1;
    }
    let mut sum = 0;
    for c in counts.iter_mut() {
        let tmp = *c;
        *c = sum;
        sum += tmp;
    }
    for r in src {
        let b = ((key(r.t) >> shift) & mask) as usize;
        dst[counts[b]] = *r;
        counts[b] += 1;
    }
}

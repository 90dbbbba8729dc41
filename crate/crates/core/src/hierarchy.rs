//! Periodicity across levels of a time hierarchy.
//!
//! Suppose every value of a coarse level `l_j` contains `p` combinations of
//! the finer levels `l_i .. l_{j-1}` (12 months per year, for instance). A
//! pattern with periodicity `f > (p-1)/p` at level `l_i` then induces `p`
//! periodic patterns at level `l_j` whose periodicities average `f` and never
//! drop below `1 - p(1-f)`. Everything here is exact rational arithmetic.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Rational = Ratio<i64>;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum HierarchyError {
    #[error("p must be positive")]
    ZeroCombinations,
    #[error("m_j must be positive")]
    ZeroPeriods,
    #[error("periodicity {0} is outside (0, 1]")]
    PeriodicityOutOfRange(Rational),
    #[error("periodicity {f} does not exceed (p-1)/p = {threshold}")]
    HypothesisViolated { f: Rational, threshold: Rational },
    #[error("expected {expected} occurrence counts, got {got}")]
    CountMismatch { expected: usize, got: usize },
    #[error("occurrence count n_{index} = {value} exceeds m_j = {max}")]
    CountTooLarge { index: usize, value: u64, max: u64 },
    #[error("f * p * m_j = {0} is not an integer occurrence count")]
    FractionalOccurrences(Rational),
}

/// Shape of a two-level hierarchy and the fine-level periodicity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HierarchySpec {
    /// Fine-level combinations per coarse-level value.
    pub p: u64,
    /// Periodicity at the fine level.
    pub f: Rational,
    /// Coarse-level periods in the lifespan.
    pub m_j: u64,
}

impl HierarchySpec {
    pub fn new(p: u64, f: Rational, m_j: u64) -> Result<Self, HierarchyError> {
        if p == 0 {
            return Err(HierarchyError::ZeroCombinations);
        }
        if m_j == 0 {
            return Err(HierarchyError::ZeroPeriods);
        }
        if f <= Rational::from_integer(0) || f > Rational::from_integer(1) {
            return Err(HierarchyError::PeriodicityOutOfRange(f));
        }
        Ok(Self { p, f, m_j })
    }

    /// Fine-level periods in the lifespan, `p * m_j`.
    pub fn m_i(&self) -> u64 {
        self.p * self.m_j
    }

    /// `(p-1)/p`, the value `f` has to exceed.
    pub fn threshold(&self) -> Rational {
        Rational::new(self.p as i64 - 1, self.p as i64)
    }
}

/// Periodicities of the `count` coarse-level patterns a fine-level pattern
/// gives rise to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivedBounds {
    pub min_periodicity: Rational,
    pub avg_periodicity: Rational,
    pub count: u64,
}

fn min_bound(p: u64, f: Rational) -> Rational {
    Rational::from_integer(1) - Rational::from_integer(p as i64) * (Rational::from_integer(1) - f)
}

pub fn derived_pattern_bounds(spec: &HierarchySpec) -> Result<DerivedBounds, HierarchyError> {
    let threshold = spec.threshold();
    if spec.f <= threshold {
        return Err(HierarchyError::HypothesisViolated { f: spec.f, threshold });
    }
    Ok(DerivedBounds { min_periodicity: min_bound(spec.p, spec.f), avg_periodicity: spec.f, count: spec.p })
}

/// Outcome of checking one occurrence assignment `n_1 .. n_p` against the
/// bounds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundCheck {
    /// `sum(n_k) / (p * m_j)`.
    pub f: Rational,
    pub hypothesis_holds: bool,
    /// `1 - p(1-f)`.
    pub min_bound: Rational,
    pub min_ratio: Rational,
    /// Index of a smallest `n_k`.
    pub argmin: usize,
    pub mean_ratio: Rational,
    /// `min_ratio >= min_bound` and `mean_ratio == f`.
    pub holds: bool,
    /// `min_ratio == min_bound`.
    pub tight: bool,
}

/// Checks the bounds on a concrete assignment of level-`l_j` occurrence
/// counts, one per fine-level combination.
pub fn verify_bounds_by_enumeration(p: u64, m_j: u64, counts: &[u64]) -> Result<BoundCheck, HierarchyError> {
    if p == 0 {
        return Err(HierarchyError::ZeroCombinations);
    }
    if m_j == 0 {
        return Err(HierarchyError::ZeroPeriods);
    }
    if counts.len() as u64 != p {
        return Err(HierarchyError::CountMismatch { expected: p as usize, got: counts.len() });
    }
    if let Some((index, &value)) = counts.iter().enumerate().find(|(_, &n)| n > m_j) {
        return Err(HierarchyError::CountTooLarge { index, value, max: m_j });
    }

    let total: u64 = counts.iter().sum();
    let (argmin, &min_count) = counts.iter().enumerate().min_by_key(|&(_, n)| *n).expect("p >= 1 counts");
    let f = Rational::new(total as i64, (p * m_j) as i64);
    let min_ratio = Rational::new(min_count as i64, m_j as i64);
    let mean_ratio = counts.iter().map(|&n| Rational::new(n as i64, m_j as i64)).sum::<Rational>()
        / Rational::from_integer(p as i64);
    let min_bound = min_bound(p, f);

    Ok(BoundCheck {
        f,
        hypothesis_holds: f > Rational::new(p as i64 - 1, p as i64),
        min_bound,
        min_ratio,
        argmin,
        mean_ratio,
        holds: min_ratio >= min_bound && mean_ratio == f,
        tight: min_ratio == min_bound,
    })
}

/// The assignment attaining the minimum: `p - 1` counts at `m_j` and the
/// remainder in the last one.
pub fn tight_assignment(spec: &HierarchySpec) -> Result<Vec<u64>, HierarchyError> {
    let occurrences = spec.f * Rational::from_integer(spec.m_i() as i64);
    if !occurrences.is_integer() {
        return Err(HierarchyError::FractionalOccurrences(occurrences));
    }
    let threshold = spec.threshold();
    if spec.f <= threshold {
        return Err(HierarchyError::HypothesisViolated { f: spec.f, threshold });
    }
    let total = occurrences.to_integer() as u64;
    let rest = total - (spec.p - 1) * spec.m_j;
    let mut counts = vec![spec.m_j; spec.p as usize - 1];
    counts.push(rest);
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn fully_periodic_stays_fully_periodic() {
        for p in [1, 2, 12, 365] {
            let b = derived_pattern_bounds(&HierarchySpec::new(p, q(1, 1), 10).unwrap()).unwrap();
            assert_eq!(b.min_periodicity, q(1, 1));
            assert_eq!(b.avg_periodicity, q(1, 1));
            assert_eq!(b.count, p);
        }
    }

    #[test]
    fn monthly_to_yearly_example() {
        let spec = HierarchySpec::new(12, q(23, 24), 10).unwrap();
        assert_eq!(spec.m_i(), 120);
        let b = derived_pattern_bounds(&spec).unwrap();
        assert_eq!(b.min_periodicity, q(1, 2));
        assert_eq!(b.avg_periodicity, q(23, 24));
    }

    #[test]
    fn three_quarters_with_two_combinations() {
        let b = derived_pattern_bounds(&HierarchySpec::new(2, q(3, 4), 4).unwrap()).unwrap();
        assert_eq!((b.min_periodicity, b.avg_periodicity), (q(1, 2), q(3, 4)));
    }

    #[test]
    fn hypothesis_violation_is_an_error() {
        let spec = HierarchySpec::new(12, q(11, 12), 10).unwrap();
        assert!(matches!(derived_pattern_bounds(&spec), Err(HierarchyError::HypothesisViolated { .. })));
        assert!(HierarchySpec::new(12, q(0, 1), 10).is_err());
        assert!(HierarchySpec::new(12, q(5, 4), 10).is_err());
        assert!(HierarchySpec::new(0, q(1, 1), 10).is_err());
    }

    #[test]
    fn eleven_full_months_and_one_half() {
        let mut counts = vec![10; 11];
        counts.push(5);
        let c = verify_bounds_by_enumeration(12, 10, &counts).unwrap();
        assert_eq!(c.f, q(23, 24));
        assert_eq!(c.min_ratio, q(1, 2));
        assert_eq!(c.mean_ratio, q(23, 24));
        assert_eq!(c.argmin, 11);
        assert!(c.holds && c.tight && c.hypothesis_holds);
    }

    #[test]
    fn full_pair() {
        let c = verify_bounds_by_enumeration(2, 5, &[5, 5]).unwrap();
        assert_eq!((c.f, c.min_ratio), (q(1, 1), q(1, 1)));
        assert!(c.holds && c.tight);
    }

    #[test]
    fn verifier_rejects_bad_counts() {
        assert!(matches!(
            verify_bounds_by_enumeration(2, 5, &[5]),
            Err(HierarchyError::CountMismatch { .. })
        ));
        assert!(matches!(
            verify_bounds_by_enumeration(2, 5, &[5, 6]),
            Err(HierarchyError::CountTooLarge { index: 1, .. })
        ));
    }

    #[test]
    fn tight_assignment_attains_bound() {
        let spec = HierarchySpec::new(12, q(23, 24), 10).unwrap();
        let counts = tight_assignment(&spec).unwrap();
        assert_eq!(counts.iter().sum::<u64>(), 115);
        let c = verify_bounds_by_enumeration(12, 10, &counts).unwrap();
        assert!(c.tight);
        // 23/24 * 12 * 7 = 80.5
        let spec = HierarchySpec::new(12, q(23, 24), 7).unwrap();
        assert!(matches!(tight_assignment(&spec), Err(HierarchyError::FractionalOccurrences(_))));
    }

    #[test]
    fn random_assignments_with_fixed_total() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let (p, m_j, total) = (12u64, 10u64, 115u64);
        for _ in 0..10_000 {
            // Remove 5 occurrences from the full assignment at random.
            let mut counts = vec![m_j; p as usize];
            let mut removed = 0;
            while removed < p * m_j - total {
                let k = rng.gen_range(0..p as usize);
                if counts[k] > 0 {
                    counts[k] -= 1;
                    removed += 1;
                }
            }
            let c = verify_bounds_by_enumeration(p, m_j, &counts).unwrap();
            assert_eq!(c.f, q(23, 24));
            assert!(c.holds, "{counts:?}");
        }
    }
}

use num_traits::{One, Zero};
use serde::Serialize;

use super::interval::RationalIntervalSet;
use super::oracle::MetricOracle;
use super::CoverError;
use crate::rational::{self, dyadic, Rational};

pub const DEFAULT_DEPTH: usize = 64;

/// An ω-indexed proximally well-monotone cover of `(0,1) ∩ ℚ`, materialized
/// at indices `0..=depth`.
///
/// `sets` strictly increase, none is the whole ground, and
/// `U_{ε(n,0)}(sets(n)) ⊆ sets(n+1)`. The ladder is `ε(n,m) = ε(n,0)·2^-m`
/// with `ε(n,0)` nonincreasing in `n`. `limit_points` are points outside
/// every set whose neighbourhoods meet all later sets: a set whose closure
/// contains one is contained in no element of the cover.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OmegaCover {
    oracle: MetricOracle,
    sets: Vec<RationalIntervalSet>,
    #[serde(with = "rational::serde_vec")]
    scales: Vec<Rational>,
    #[serde(with = "rational::serde_vec")]
    limit_points: Vec<Rational>,
}

/// Least `i < len` with `pred(i)`, for a predicate monotone in `i`.
pub(crate) fn first_index(len: usize, pred: impl Fn(usize) -> bool) -> Option<usize> {
    let (mut lo, mut hi) = (0, len);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    (lo < len).then_some(lo)
}

impl OmegaCover {
    pub fn new(
        oracle: MetricOracle,
        sets: Vec<RationalIntervalSet>,
        scales: Vec<Rational>,
        limit_points: Vec<Rational>,
    ) -> Result<Self, CoverError> {
        let c = Self::raw(oracle, sets, scales, limit_points);
        c.validate()?;
        Ok(c)
    }

    /// Builds without validation; see [`pwm_via_metrics_check`].
    pub fn raw(
        oracle: MetricOracle,
        sets: Vec<RationalIntervalSet>,
        scales: Vec<Rational>,
        limit_points: Vec<Rational>,
    ) -> Self {
        OmegaCover {
            oracle,
            sets,
            scales,
            limit_points,
        }
    }

    pub fn validate(&self) -> Result<(), CoverError> {
        if self.sets.is_empty() || self.sets.len() != self.scales.len() {
            return Err(CoverError::InvalidArgument(
                "a cover needs one scale per materialized set".into(),
            ));
        }
        for (n, s) in self.sets.iter().enumerate() {
            if s.is_empty() {
                return Err(CoverError::EmptySet { index: n });
            }
            if s.is_ground() {
                return Err(CoverError::EqualsGround { index: n });
            }
            if !rational::is_positive(&self.scales[n]) {
                return Err(CoverError::InvalidArgument(format!("scale at {n} is not positive")));
            }
            if let Some(p) = self.limit_points.iter().find(|p| s.closure_contains(p)) {
                return Err(CoverError::InvalidArgument(format!(
                    "limit point {} lies in the closure of set {n}",
                    rational::format(p)
                )));
            }
        }
        for n in 0..self.depth() {
            if !self.sets[n].is_subset(&self.sets[n + 1]) || self.sets[n] == self.sets[n + 1] {
                return Err(CoverError::NotStrictlyIncreasing { index: n });
            }
            if self.scales[n + 1] > self.scales[n] {
                return Err(CoverError::ScalesNotMonotone { index: n + 1 });
            }
            let escape = self.oracle.image(&self.scales[n], &self.sets[n]).difference(&self.sets[n + 1]);
            if !escape.is_empty() {
                return Err(CoverError::WitnessFails {
                    index: n,
                    violation: escape.to_string(),
                });
            }
        }
        Ok(())
    }

    pub fn oracle(&self) -> MetricOracle {
        self.oracle
    }

    /// Largest materialized index.
    pub fn depth(&self) -> usize {
        self.sets.len() - 1
    }

    pub fn set(&self, n: usize) -> &RationalIntervalSet {
        &self.sets[n]
    }

    pub fn sets(&self) -> &[RationalIntervalSet] {
        &self.sets
    }

    /// `ε(n, 0)`.
    pub fn scale(&self, n: usize) -> &Rational {
        &self.scales[n]
    }

    /// `ε(n, m) = ε(n, 0)·2^-m`.
    pub fn scale_at(&self, n: usize, m: u32) -> Rational {
        &self.scales[n] * dyadic(m)
    }

    pub fn scales(&self) -> &[Rational] {
        &self.scales
    }

    pub fn limit_points(&self) -> &[Rational] {
        &self.limit_points
    }

    /// `sets(n) ∖ sets(n-1)`.
    pub fn layer(&self, n: usize) -> RationalIntervalSet {
        match n {
            0 => self.sets[0].clone(),
            _ => self.sets[n].difference(&self.sets[n - 1]),
        }
    }

    fn beyond(&self, what: String) -> CoverError {
        CoverError::BeyondTruncation {
            what,
            depth: self.depth(),
        }
    }

    /// Least `n` with `x ∈ sets(n)`.
    pub fn index_of_point(&self, x: &Rational) -> Result<usize, CoverError> {
        if x <= &Rational::zero() || x >= &Rational::one() {
            return Err(CoverError::OutsideGround(rational::format(x)));
        }
        first_index(self.sets.len(), |n| self.sets[n].contains(x))
            .ok_or_else(|| self.beyond(format!("point {}", rational::format(x))))
    }

    /// `U_𝒢(x) = sets(n_x + 1)`.
    pub fn successor_of_point(&self, x: &Rational) -> Result<&RationalIntervalSet, CoverError> {
        let n = self.index_of_point(x)?;
        self.sets
            .get(n + 1)
            .ok_or_else(|| self.beyond(format!("successor of {}", rational::format(x))))
    }

    /// Whether `(x, y) ∈ U_𝒢`.
    pub fn relation_contains(&self, x: &Rational, y: &Rational) -> Result<bool, CoverError> {
        Ok(self.successor_of_point(x)?.contains(y))
    }

    pub fn smallest_containing(&self, a: &RationalIntervalSet) -> Option<usize> {
        first_index(self.sets.len(), |n| a.is_subset(&self.sets[n]))
    }

    pub fn smallest_intersecting(&self, a: &RationalIntervalSet) -> Option<usize> {
        first_index(self.sets.len(), |n| a.intersects(&self.sets[n]))
    }

    /// Whether `a` is contained in no element of the cover, detected by a
    /// limit point in its closure.
    pub fn is_cofinal(&self, a: &RationalIntervalSet) -> bool {
        self.limit_points.iter().any(|p| a.closure_contains(p))
    }

    /// `U_𝒢(A)`: the whole ground for cofinal `A`, else `sets(n_A + 1)` with
    /// `n_A` the least index whose set contains `A`.
    pub fn successor_of_set(&self, a: &RationalIntervalSet) -> Result<RationalIntervalSet, CoverError> {
        if a.is_empty() {
            return Ok(RationalIntervalSet::empty());
        }
        if self.is_cofinal(a) {
            return Ok(RationalIntervalSet::ground());
        }
        self.smallest_containing(a)
            .and_then(|n| self.sets.get(n + 1))
            .cloned()
            .ok_or_else(|| self.beyond(format!("successor of {a}")))
    }
}

/// Builds a cover from a strictly increasing sequence with explicit `≪`
/// witness scales: `U_{w(n)}(sets(n)) ⊆ sets(n+1)`. The ladder is the running
/// minimum of the witness scales.
pub fn chain_cover_from_sequence(
    oracle: MetricOracle,
    depth: usize,
    sets: impl Fn(usize) -> RationalIntervalSet,
    witness_scales: impl Fn(usize) -> Rational,
    limit_points: Vec<Rational>,
) -> Result<OmegaCover, CoverError> {
    let sets: Vec<_> = (0..=depth).map(sets).collect();
    let witness: Vec<_> = (0..=depth).map(witness_scales).collect();
    for n in 0..depth {
        if !rational::is_positive(&witness[n]) {
            return Err(CoverError::InvalidArgument(format!("witness scale at {n} is not positive")));
        }
        if !sets[n].is_subset(&sets[n + 1]) || sets[n] == sets[n + 1] {
            return Err(CoverError::NotStrictlyIncreasing { index: n });
        }
        let escape = oracle.image(&witness[n], &sets[n]).difference(&sets[n + 1]);
        if !escape.is_empty() {
            return Err(CoverError::WitnessFails {
                index: n,
                violation: escape.to_string(),
            });
        }
    }
    let mut ladder = Vec::with_capacity(witness.len());
    for w in witness {
        let next = match ladder.last() {
            Some(prev) => rational::min(prev, &w),
            None => w,
        };
        ladder.push(next);
    }
    OmegaCover::new(oracle, sets, ladder, limit_points)
}

/// The cover `G_i = (eps/(i+1), 1)` of `(0,1)` under the euclidean oracle,
/// with witness scales `eps/(i+1) - eps/(i+2)` and limit point `0`.
pub fn dense_cover(eps: &Rational, depth: usize) -> Result<OmegaCover, CoverError> {
    if !rational::is_positive(eps) || eps >= &Rational::one() {
        return Err(CoverError::InvalidArgument(
            "eps must satisfy 0 < eps < 1".into(),
        ));
    }
    let at = |i: usize| eps / Rational::from_integer((i as i64 + 1).into());
    chain_cover_from_sequence(
        MetricOracle::Euclid,
        depth,
        |i| RationalIntervalSet::open(at(i), Rational::one()),
        |i| at(i) - at(i + 1),
        vec![Rational::zero()],
    )
}

/// Realizes the cover through the quasi-pseudometrics `q_n = q / ε(n,0)`:
/// they must increase with `n` (scales nonincreasing) and their unit balls
/// around `sets(n)` must stay inside `sets(n+1)`.
pub fn pwm_via_metrics_check(c: &OmegaCover) -> bool {
    let scales_ok = c.scales.iter().all(rational::is_positive) && c.scales.windows(2).all(|w| w[1] <= w[0]);
    scales_ok
        && (0..c.depth()).all(|n| c.oracle.image(&c.scales[n], &c.sets[n]).is_subset(&c.sets[n + 1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn flagship() -> OmegaCover {
        dense_cover(&rat(1, 2), DEFAULT_DEPTH).unwrap()
    }

    #[test]
    fn flagship_shape() {
        let c = flagship();
        assert_eq!(c.depth(), 64);
        assert_eq!(c.set(0), &RationalIntervalSet::open(rat(1, 2), rat(1, 1)));
        assert_eq!(c.set(3), &RationalIntervalSet::open(rat(1, 8), rat(1, 1)));
        assert_eq!(c.scale(0), &rat(1, 4));
        assert_eq!(c.scale(2), &rat(1, 24));
        assert_eq!(c.scale_at(2, 3), rat(1, 192));
        assert!(pwm_via_metrics_check(&c));
    }

    #[test]
    fn explicit_chain_sequence() {
        let c = chain_cover_from_sequence(
            MetricOracle::Euclid,
            10,
            |n| RationalIntervalSet::open(rat(1, 2 * n as i64 + 2), rat(1, 1)),
            |n| rat(1, 2 * (n as i64 + 1) * (n as i64 + 2)),
            vec![rat(0, 1)],
        )
        .unwrap();
        assert_eq!(c, dense_cover(&rat(1, 2), 10).unwrap());
    }

    #[test]
    fn constant_sets_are_rejected() {
        let r = chain_cover_from_sequence(
            MetricOracle::Euclid,
            3,
            |_| RationalIntervalSet::open(rat(1, 2), rat(1, 1)),
            |_| rat(1, 8),
            vec![rat(0, 1)],
        );
        assert_eq!(r, Err(CoverError::NotStrictlyIncreasing { index: 0 }));
    }

    #[test]
    fn oversized_scales_report_the_escape() {
        let r = chain_cover_from_sequence(
            MetricOracle::Euclid,
            3,
            |n| RationalIntervalSet::open(rat(1, 2 * n as i64 + 2), rat(1, 1)),
            |_| rat(1, 4),
            vec![rat(0, 1)],
        );
        assert_eq!(
            r,
            Err(CoverError::WitnessFails {
                index: 1,
                violation: "(0,1/6]".into()
            })
        );
    }

    #[test]
    fn successor_of_point() {
        let c = flagship();
        assert_eq!(c.index_of_point(&rat(3, 4)).unwrap(), 0);
        assert_eq!(c.successor_of_point(&rat(3, 4)).unwrap(), c.set(1));
        // 1/2 is not in (1/2,1), but is in (1/4,1).
        assert_eq!(c.index_of_point(&rat(1, 2)).unwrap(), 1);
        assert_eq!(c.successor_of_point(&rat(1, 2)).unwrap(), c.set(2));
        assert_eq!(c.index_of_point(&rat(1, 7)).unwrap(), 3);
        assert!(matches!(
            c.index_of_point(&rat(1, 1000)),
            Err(CoverError::BeyondTruncation { .. })
        ));
        assert!(matches!(c.index_of_point(&rat(1, 1)), Err(CoverError::OutsideGround(_))));
        // n_x = 64 has no materialized successor.
        assert!(c.successor_of_point(&rat(1, 129)).is_err());
    }

    #[test]
    fn successor_of_set() {
        let c = flagship();
        let a = RationalIntervalSet::open(rat(1, 4), rat(1, 3));
        assert_eq!(c.smallest_containing(&a), Some(1));
        assert_eq!(c.successor_of_set(&a).unwrap(), *c.set(2));
        assert!(c.is_cofinal(&RationalIntervalSet::open(rat(0, 1), rat(1, 100))));
        assert!(c.successor_of_set(&RationalIntervalSet::open(rat(0, 1), rat(1, 100))).unwrap().is_ground());
    }

    #[test]
    fn dense_cover_rejects_large_eps() {
        assert!(dense_cover(&rat(1, 1), 4).is_err());
        assert!(dense_cover(&rat(0, 1), 4).is_err());
    }

    #[test]
    fn pwm_check_detects_growing_scales() {
        let c = flagship();
        let mut scales = c.scales().to_vec();
        scales[3] = rat(1, 2);
        let bad = OmegaCover::raw(c.oracle(), c.sets().to_vec(), scales, vec![rat(0, 1)]);
        assert!(!pwm_via_metrics_check(&bad));
        assert!(bad.validate().is_err());
        let single = OmegaCover::raw(MetricOracle::Euclid, vec![c.set(0).clone()], vec![rat(1, 4)], vec![]);
        assert!(pwm_via_metrics_check(&single));
    }
}

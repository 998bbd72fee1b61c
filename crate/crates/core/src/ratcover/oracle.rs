use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::interval::{Interval, RationalIntervalSet};
use crate::rational::Rational;

/// Quasi-pseudometric on ℚ whose entourages `U_ε = {q < ε}` map interval sets
/// to interval sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricOracle {
    /// `|x - y|`
    Euclid,
    /// `max(y - x, 0)`
    Upper,
    /// `max(x - y, 0)`
    Lower,
}

impl MetricOracle {
    pub const ALL: [MetricOracle; 3] = [MetricOracle::Euclid, MetricOracle::Upper, MetricOracle::Lower];

    pub fn dist(self, x: &Rational, y: &Rational) -> Rational {
        let zero = Rational::zero();
        match self {
            MetricOracle::Euclid => (x - y).abs(),
            MetricOracle::Upper => std::cmp::max(y - x, zero),
            MetricOracle::Lower => std::cmp::max(x - y, zero),
        }
    }

    /// The oracle of `q⁻¹(x, y) = q(y, x)`.
    pub fn conjugate(self) -> Self {
        match self {
            MetricOracle::Euclid => MetricOracle::Euclid,
            MetricOracle::Upper => MetricOracle::Lower,
            MetricOracle::Lower => MetricOracle::Upper,
        }
    }

    /// `U_ε(A) = {y : q(x, y) < ε for some x ∈ A}`.
    pub fn image(self, eps: &Rational, a: &RationalIntervalSet) -> RationalIntervalSet {
        let pieces = a
            .intervals()
            .iter()
            .map(|iv| match self {
                MetricOracle::Euclid => Interval::open(&iv.lo - eps, &iv.hi + eps),
                MetricOracle::Upper => Interval::open(Rational::zero(), &iv.hi + eps),
                MetricOracle::Lower => Interval::open(&iv.lo - eps, Rational::one()),
            })
            .collect();
        RationalIntervalSet::from_intervals(pieces)
    }

    /// `U_ε⁻¹(A) = {x : q(x, y) < ε for some y ∈ A}`.
    pub fn preimage(self, eps: &Rational, a: &RationalIntervalSet) -> RationalIntervalSet {
        self.conjugate().image(eps, a)
    }

    /// `U_ε(x)`.
    pub fn ball(self, eps: &Rational, x: &Rational) -> RationalIntervalSet {
        self.image(eps, &RationalIntervalSet::point(x.clone()))
    }

    /// Whether `A × A ⊆ U_u`. For all three kinds this reduces to the
    /// diameter: `sup - inf < u`, or `= u` with an endpoint not attained.
    pub fn is_small(self, u: &Rational, a: &RationalIntervalSet) -> bool {
        let (Some((lo, lo_att)), Some((hi, hi_att))) = (a.inf(), a.sup()) else {
            return true;
        };
        let diam = hi - lo;
        diam < *u || (diam == *u && !(lo_att && hi_att))
    }
}

/// Exact `U_ε(A)` for the oracle's entourage at scale `eps`.
pub fn iv_image(oracle: MetricOracle, eps: &Rational, a: &RationalIntervalSet) -> RationalIntervalSet {
    oracle.image(eps, a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn image_examples() {
        let a = RationalIntervalSet::open(rat(0, 1), rat(1, 2));
        assert_eq!(
            iv_image(MetricOracle::Upper, &rat(1, 4), &a),
            RationalIntervalSet::open(rat(0, 1), rat(3, 4))
        );
        assert_eq!(
            iv_image(MetricOracle::Euclid, &rat(1, 4), &RationalIntervalSet::point(rat(1, 2))),
            RationalIntervalSet::open(rat(1, 4), rat(3, 4))
        );
        for o in MetricOracle::ALL {
            assert!(iv_image(o, &rat(1, 2), &RationalIntervalSet::empty()).is_empty());
        }
    }

    #[test]
    fn image_matches_pointwise_definition() {
        let a = RationalIntervalSet::from_intervals(vec![
            Interval::new(rat(1, 5), rat(1, 4), false, true),
            Interval::point(rat(2, 3)),
        ]);
        let eps = rat(1, 10);
        let members: Vec<Rational> = (1..60).map(|i| rat(i, 60)).chain((1..40).map(|i| rat(2 * i - 1, 80))).collect();
        for o in MetricOracle::ALL {
            let img = o.image(&eps, &a);
            let pre = o.preimage(&eps, &a);
            for y in (1..200).map(|i| rat(i, 200)) {
                let direct = members.iter().filter(|x| a.contains(x)).any(|x| o.dist(x, &y) < eps);
                if direct {
                    assert!(img.contains(&y), "{o:?} {y}");
                }
                let back = members.iter().filter(|x| a.contains(x)).any(|x| o.dist(&y, x) < eps);
                if back {
                    assert!(pre.contains(&y), "{o:?} {y}");
                }
            }
        }
    }

    #[test]
    fn smallness_is_one_sided_diameter() {
        let u = rat(1, 10);
        let half_open = RationalIntervalSet::from_intervals(vec![Interval::new(rat(1, 10), rat(1, 5), false, true)]);
        let closed = RationalIntervalSet::closed(rat(1, 10), rat(1, 5));
        for o in MetricOracle::ALL {
            assert!(o.is_small(&u, &half_open));
            assert!(!o.is_small(&u, &closed));
            assert!(o.is_small(&u, &RationalIntervalSet::empty()));
        }
        assert!(MetricOracle::Lower.dist(&rat(1, 5), &rat(1, 10)) == u);
        assert!(MetricOracle::Lower.dist(&rat(1, 10), &rat(1, 5)) == rat(0, 1));
    }
}

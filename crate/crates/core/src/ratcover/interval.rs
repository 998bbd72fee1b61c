use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{self, Rational};

/// One convex piece with rational endpoints.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Interval {
    #[serde(with = "rational::serde_str")]
    pub lo: Rational,
    #[serde(with = "rational::serde_str")]
    pub hi: Rational,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational, lo_open: bool, hi_open: bool) -> Self {
        Interval { lo, hi, lo_open, hi_open }
    }

    pub fn open(lo: Rational, hi: Rational) -> Self {
        Self::new(lo, hi, true, true)
    }

    pub fn closed(lo: Rational, hi: Rational) -> Self {
        Self::new(lo, hi, false, false)
    }

    pub fn point(x: Rational) -> Self {
        Self::closed(x.clone(), x)
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let above = &self.lo < x || (&self.lo == x && !self.lo_open);
        let below = x < &self.hi || (x == &self.hi && !self.hi_open);
        above && below
    }

    fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && (self.lo_open || self.hi_open))
    }

    /// Intersect with (0,1).
    fn clip(mut self) -> Option<Self> {
        if self.lo <= Rational::zero() {
            self.lo = Rational::zero();
            self.lo_open = true;
        }
        if self.hi >= Rational::one() {
            self.hi = Rational::one();
            self.hi_open = true;
        }
        (!self.is_empty()).then_some(self)
    }

    fn intersect(&self, other: &Interval) -> Option<Interval> {
        let (lo, lo_open) = match self.lo.cmp(&other.lo) {
            std::cmp::Ordering::Greater => (self.lo.clone(), self.lo_open),
            std::cmp::Ordering::Less => (other.lo.clone(), other.lo_open),
            std::cmp::Ordering::Equal => (self.lo.clone(), self.lo_open || other.lo_open),
        };
        let (hi, hi_open) = match self.hi.cmp(&other.hi) {
            std::cmp::Ordering::Less => (self.hi.clone(), self.hi_open),
            std::cmp::Ordering::Greater => (other.hi.clone(), other.hi_open),
            std::cmp::Ordering::Equal => (self.hi.clone(), self.hi_open || other.hi_open),
        };
        let iv = Interval { lo, hi, lo_open, hi_open };
        (!iv.is_empty()).then_some(iv)
    }
}

/// Compact form for display: integers without a denominator.
fn show(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        rational::format(r)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lo == self.hi {
            return write!(f, "{{{}}}", show(&self.lo));
        }
        write!(
            f,
            "{}{},{}{}",
            if self.lo_open { '(' } else { '[' },
            show(&self.lo),
            show(&self.hi),
            if self.hi_open { ')' } else { ']' }
        )
    }
}

/// A finite union of intervals, read as a subset of `(0,1) ∩ ℚ`.
///
/// Stored normalized: clipped to `(0,1)`, sorted, pairwise disjoint and
/// non-adjacent, so structural equality is set equality.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "Vec<Interval>", into = "Vec<Interval>")]
pub struct RationalIntervalSet {
    intervals: Vec<Interval>,
}

impl From<Vec<Interval>> for RationalIntervalSet {
    fn from(v: Vec<Interval>) -> Self {
        Self::from_intervals(v)
    }
}

impl From<RationalIntervalSet> for Vec<Interval> {
    fn from(s: RationalIntervalSet) -> Self {
        s.intervals
    }
}

impl RationalIntervalSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// The whole ground `(0,1)`.
    pub fn ground() -> Self {
        Self::open(Rational::zero(), Rational::one())
    }

    pub fn open(lo: Rational, hi: Rational) -> Self {
        Self::from_intervals(vec![Interval::open(lo, hi)])
    }

    pub fn closed(lo: Rational, hi: Rational) -> Self {
        Self::from_intervals(vec![Interval::closed(lo, hi)])
    }

    pub fn point(x: Rational) -> Self {
        Self::from_intervals(vec![Interval::point(x)])
    }

    pub fn from_intervals(v: Vec<Interval>) -> Self {
        let mut v: Vec<Interval> = v.into_iter().filter_map(Interval::clip).collect();
        v.sort_by(|a, b| a.lo.cmp(&b.lo).then(a.lo_open.cmp(&b.lo_open)));
        let mut out: Vec<Interval> = Vec::with_capacity(v.len());
        for iv in v {
            if let Some(cur) = out.last_mut() {
                let touches = iv.lo < cur.hi || (iv.lo == cur.hi && !(cur.hi_open && iv.lo_open));
                if touches {
                    match iv.hi.cmp(&cur.hi) {
                        std::cmp::Ordering::Greater => {
                            cur.hi = iv.hi;
                            cur.hi_open = iv.hi_open;
                        }
                        std::cmp::Ordering::Equal => cur.hi_open &= iv.hi_open,
                        std::cmp::Ordering::Less => {}
                    }
                    continue;
                }
            }
            out.push(iv);
        }
        RationalIntervalSet { intervals: out }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn is_ground(&self) -> bool {
        *self == Self::ground()
    }

    pub fn contains(&self, x: &Rational) -> bool {
        x > &Rational::zero() && x < &Rational::one() && self.intervals.iter().any(|iv| iv.contains(x))
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::from_intervals(self.intervals.iter().chain(&other.intervals).cloned().collect())
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let mut v = Vec::new();
        for a in &self.intervals {
            for b in &other.intervals {
                v.extend(a.intersect(b));
            }
        }
        Self::from_intervals(v)
    }

    /// Complement inside `(0,1)`.
    pub fn complement(&self) -> Self {
        let mut gaps = Vec::with_capacity(self.intervals.len() + 1);
        let mut start = Rational::zero();
        let mut start_open = true;
        for iv in &self.intervals {
            gaps.push(Interval::new(start, iv.lo.clone(), start_open, !iv.lo_open));
            start = iv.hi.clone();
            start_open = !iv.hi_open;
        }
        gaps.push(Interval::new(start, Rational::one(), start_open, true));
        Self::from_intervals(gaps)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.intersection(&other.complement())
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.difference(other).is_empty()
    }

    pub fn intersects(&self, other: &Self) -> bool {
        !self.intersection(other).is_empty()
    }

    /// Infimum and whether it is attained.
    pub fn inf(&self) -> Option<(&Rational, bool)> {
        self.intervals.first().map(|iv| (&iv.lo, !iv.lo_open))
    }

    /// Supremum and whether it is attained.
    pub fn sup(&self) -> Option<(&Rational, bool)> {
        self.intervals.last().map(|iv| (&iv.hi, !iv.hi_open))
    }

    /// Whether `p` lies in the closure (taken in ℝ).
    pub fn closure_contains(&self, p: &Rational) -> bool {
        self.intervals.iter().any(|iv| &iv.lo <= p && p <= &iv.hi)
    }

    /// A deterministic member: the leftmost point, or the midpoint of the
    /// leftmost interval.
    pub fn sample_point(&self) -> Option<Rational> {
        let iv = self.intervals.first()?;
        Some(if iv.lo == iv.hi {
            iv.lo.clone()
        } else {
            rational::midpoint(&iv.lo, &iv.hi)
        })
    }

    /// `count` equally spaced interior points of `[inf, sup]` that belong to
    /// the set.
    pub fn grid(&self, count: usize) -> Vec<Rational> {
        let (Some((lo, _)), Some((hi, _))) = (self.inf(), self.sup()) else {
            return Vec::new();
        };
        let steps = Rational::from_integer((count as i64 + 1).into());
        let width = hi - lo;
        (1..=count)
            .map(|i| lo + &width * Rational::from_integer((i as i64).into()) / &steps)
            .filter(|x| self.contains(x))
            .collect()
    }
}

impl fmt::Display for RationalIntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return f.write_str("∅");
        }
        for (i, iv) in self.intervals.iter().enumerate() {
            if i > 0 {
                f.write_str("∪")?;
            }
            write!(f, "{iv}")?;
        }
        Ok(())
    }
}

use serde::Serialize;

use super::check::{all_hold, Check};
use super::cover::OmegaCover;
use super::interval::{Interval, RationalIntervalSet};
use super::CoverError;
use crate::rational::{self, Rational};

/// Sample points drawn from `A ∖ G` when recording hypothesis witnesses.
pub const HAUS_PROBE_POINTS: usize = 16;

fn require_nonempty(a: &RationalIntervalSet) -> Result<(), CoverError> {
    if a.is_empty() {
        return Err(CoverError::InvalidArgument("probe set is empty".into()));
    }
    Ok(())
}

fn require_positive(s: &Rational, what: &str) -> Result<(), CoverError> {
    if !rational::is_positive(s) {
        return Err(CoverError::InvalidArgument(format!("{what} must be positive")));
    }
    Ok(())
}

fn beyond(c: &OmegaCover, what: String) -> CoverError {
    CoverError::BeyondTruncation { what, depth: c.depth() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MonotoneCoverBranch {
    /// `A` lies inside some element of the cover.
    Contained,
    /// `A` is contained in no element, so `U_𝒢(A)` is the whole ground.
    Cofinal,
}

/// Witness that `(U_𝒢)_H` contains `U_H` at `A` for the metric entourage
/// `U = U_scale`: `U(A) ⊆ U_𝒢(A)`, and a point `y ∈ A` with
/// `U(y) ⊆ U_𝒢(x)` for every `x ∈ A`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MonotoneCoverCertificate {
    pub probe: RationalIntervalSet,
    pub branch: MonotoneCoverBranch,
    /// Smallest index whose set meets `A`.
    pub g1: usize,
    /// Smallest index whose set contains `A`.
    pub g2: Option<usize>,
    #[serde(with = "rational::serde_str")]
    pub scale: Rational,
    #[serde(with = "rational::serde_str")]
    pub witness: Rational,
    pub image: RationalIntervalSet,
    pub target: RationalIntervalSet,
    pub checks: Vec<Check>,
}

impl MonotoneCoverCertificate {
    pub fn passed(&self) -> bool {
        all_hold(&self.checks)
    }
}

pub fn cert_monotonecover(c: &OmegaCover, a: &RationalIntervalSet) -> Result<MonotoneCoverCertificate, CoverError> {
    require_nonempty(a)?;
    let oracle = c.oracle();
    let g1 = c
        .smallest_intersecting(a)
        .ok_or_else(|| beyond(c, format!("no materialized set meets {a}")))?;
    if g1 + 1 > c.depth() {
        return Err(beyond(c, format!("successor of index {g1}")));
    }
    let (branch, g2, scale, target) = if c.is_cofinal(a) {
        (MonotoneCoverBranch::Cofinal, None, c.scale(g1).clone(), RationalIntervalSet::ground())
    } else {
        let g2 = c
            .smallest_containing(a)
            .ok_or_else(|| beyond(c, format!("no materialized set contains {a}")))?;
        let target = c
            .sets()
            .get(g2 + 1)
            .cloned()
            .ok_or_else(|| beyond(c, format!("successor of index {g2}")))?;
        (MonotoneCoverBranch::Contained, Some(g2), c.scale(g2).clone(), target)
    };
    let image = oracle.image(&scale, a);
    let meet = a.intersection(c.set(g1));
    let witness = meet.sample_point().expect("g1 meets a");
    let witness_ball = oracle.ball(&scale, &witness);
    let minimal = g1 == 0 || !a.intersects(c.set(g1 - 1));
    let checks = vec![
        Check::exact("U(A) inside U_G(A)", image.is_subset(&target)),
        Check::exact("A misses every set below G1", minimal),
        Check::exact("U(y) inside successor of G1", witness_ball.is_subset(c.set(g1 + 1))),
    ];
    Ok(MonotoneCoverCertificate {
        probe: a.clone(),
        branch,
        g1,
        g2,
        scale,
        witness,
        image,
        target,
        checks,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MonotoneHausOutcome {
    /// `A ⊆ sets(index)`; `U_{ε(index,0)}(x) ⊆ U_𝒢(x)` for all `x ∈ A`.
    Contained { index: usize },
    /// Hypothesis met at `sets(g)`; conclusion checked with
    /// `W = U_{w_scale}`.
    Certified {
        g: usize,
        #[serde(with = "rational::serde_str")]
        w_scale: Rational,
    },
    /// No materialized index satisfies the hypothesis for this `A`.
    HypothesisFails { reason: String },
}

/// Hypothesis witnesses for one sample `x ∈ A ∖ G`: `a ∈ A ∩ G` with
/// `q(x, a) < u`, and `a' ∈ A` outside the deepest materialized set with
/// `q(a', x) < u`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HausWitness {
    #[serde(with = "rational::serde_str")]
    pub x: Rational,
    #[serde(with = "rational::serde_str")]
    pub a: Rational,
    #[serde(with = "rational::serde_str")]
    pub a_prime: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MonotoneHausCertificate {
    pub probe: RationalIntervalSet,
    #[serde(with = "rational::serde_str")]
    pub v_scale: Rational,
    #[serde(with = "rational::serde_str")]
    pub u_scale: Rational,
    pub outcome: MonotoneHausOutcome,
    pub witnesses: Vec<HausWitness>,
    pub checks: Vec<Check>,
}

impl MonotoneHausCertificate {
    pub fn hypothesis_holds(&self) -> bool {
        !matches!(self.outcome, MonotoneHausOutcome::HypothesisFails { .. })
    }

    pub fn passed(&self) -> bool {
        self.hypothesis_holds() && all_hold(&self.checks)
    }
}

/// `(U_𝒢 ∩ U_v)(A)` restricted to the deepest materialized set. On
/// `layer(k)` a point `y` is reached from `x ∈ A` iff `x ∉ sets(k-2)` and
/// `q(x, y) < v`.
fn restricted_target(c: &OmegaCover, v: &Rational, a: &RationalIntervalSet) -> RationalIntervalSet {
    let oracle = c.oracle();
    let mut z = RationalIntervalSet::empty();
    for k in 0..=c.depth() {
        let sources = if k < 2 { a.clone() } else { a.difference(c.set(k - 2)) };
        z = z.union(&c.layer(k).intersection(&oracle.image(v, &sources)));
    }
    z
}

/// Checks the hypothesis of the monotone Hausdorff criterion for
/// `U = U_{v/2}` at `A`, and then the qh-local conditions for
/// `U_𝒢 ∩ U_v` at `A`.
pub fn cert_monotonehaus(
    c: &OmegaCover,
    v_scale: &Rational,
    a: &RationalIntervalSet,
) -> Result<MonotoneHausCertificate, CoverError> {
    require_nonempty(a)?;
    require_positive(v_scale, "v_scale")?;
    let oracle = c.oracle();
    let u = v_scale / Rational::from_integer(2.into());
    let mut cert = MonotoneHausCertificate {
        probe: a.clone(),
        v_scale: v_scale.clone(),
        u_scale: u.clone(),
        outcome: MonotoneHausOutcome::HypothesisFails { reason: String::new() },
        witnesses: Vec::new(),
        checks: Vec::new(),
    };

    if !c.is_cofinal(a) {
        let n_a = c
            .smallest_containing(a)
            .ok_or_else(|| beyond(c, format!("no materialized set contains {a}")))?;
        if n_a + 1 > c.depth() {
            return Err(beyond(c, format!("successor of index {n_a}")));
        }
        let scale = c.scale(n_a);
        let ok = (0..=n_a).all(|n| {
            let part = a.intersection(&c.layer(n));
            part.is_empty() || oracle.image(scale, &part).is_subset(c.set(n + 1))
        });
        cert.outcome = MonotoneHausOutcome::Contained { index: n_a };
        cert.checks
            .push(Check::exact("U_G(x) inside U_cover(x) on every layer of A", ok));
        return Ok(cert);
    }

    let deepest = a.difference(c.set(c.depth()));
    let found = (0..c.depth()).find(|&g| {
        let inside = a.intersection(c.set(g));
        let outside = a.difference(c.set(g));
        !inside.is_empty()
            && outside.is_subset(&oracle.preimage(&u, &inside))
            && outside.is_subset(&oracle.image(&u, &deepest))
    });
    let Some(g) = found else {
        cert.outcome = MonotoneHausOutcome::HypothesisFails {
            reason: format!(
                "no index up to {} has every point of A outside it within {} of A inside it",
                c.depth(),
                rational::format(&u)
            ),
        };
        return Ok(cert);
    };
    let inside = a.intersection(c.set(g));
    let outside = a.difference(c.set(g));
    cert.checks.push(
        Check::exact("every x in A outside G has a in A inside G with q(x,a) < u", true)
            .with_detail(format!("G = sets({g})")),
    );
    cert.checks.push(
        Check::exact("every x in A outside G has a' in A outside each materialized G' with q(a',x) < u", true)
            .with_detail(format!("A outside G' = {deepest}")),
    );

    let mut samples = outside.grid(HAUS_PROBE_POINTS);
    samples.extend(outside.sample_point());
    let mut sampled_ok = true;
    for x in samples {
        let a_pt = inside.intersection(&oracle.ball(&u, &x)).sample_point();
        let a_prime = deepest.intersection(&oracle.preimage(&u, &RationalIntervalSet::point(x.clone()))).sample_point();
        match (a_pt, a_prime) {
            (Some(a_pt), Some(a_prime)) => {
                sampled_ok &= oracle.dist(&x, &a_pt) < u && oracle.dist(&a_prime, &x) < u;
                cert.witnesses.push(HausWitness { x, a: a_pt, a_prime });
            }
            _ => sampled_ok = false,
        }
    }
    cert.checks
        .push(Check::sampled("hypothesis witnesses verified pointwise", sampled_ok));

    let w = rational::min(c.scale(g), &u);
    let region = c.set(c.depth());
    let z = restricted_target(c, v_scale, a);
    let first = oracle.image(&w, a).intersection(region).is_subset(&z);
    cert.checks.push(
        Check::exact("W(A) inside (U_cover ∩ V)(A)", first).with_detail(format!("within {region}")),
    );

    let mut second = true;
    let mut points = a.intersection(c.set(c.depth() - 1)).grid(HAUS_PROBE_POINTS);
    points.extend(cert.witnesses.iter().map(|h| h.x.clone()).filter(|x| c.set(c.depth() - 1).contains(x)));
    for x in &points {
        let target = c.successor_of_point(x)?.intersection(&oracle.ball(v_scale, x));
        let partner = if c.set(g).contains(x) {
            Some(x.clone())
        } else {
            inside.intersection(&oracle.ball(&u, x)).sample_point()
        };
        second &= partner.is_some_and(|p| oracle.ball(&w, &p).is_subset(&target));
    }
    cert.checks.push(
        Check::sampled("each x in A has a in A with W(a) inside (U_cover ∩ V)(x)", second)
            .with_detail(format!("{} points", points.len())),
    );
    cert.outcome = MonotoneHausOutcome::Certified { g, w_scale: w };
    Ok(cert)
}

/// A decomposition of the complement of `sets(index)` into finitely many
/// `U_u`-small pieces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundedHausCertificate {
    #[serde(with = "rational::serde_str")]
    pub u_scale: Rational,
    pub index: usize,
    pub pieces: Vec<RationalIntervalSet>,
    pub checks: Vec<Check>,
}

impl BoundedHausCertificate {
    pub fn passed(&self) -> bool {
        all_hold(&self.checks)
    }
}

/// Greedy left-to-right split into pieces of diameter at most `u`, each
/// either short or missing an endpoint. Optimal in one dimension.
fn small_pieces(u: &Rational, set: &RationalIntervalSet) -> Vec<RationalIntervalSet> {
    let mut rest = set.clone();
    let mut pieces = Vec::new();
    while let Some((lo, attained)) = rest.inf() {
        let lo = lo.clone();
        let window = Interval::new(lo.clone(), &lo + u, !attained, attained);
        let piece = rest.intersection(&RationalIntervalSet::from_intervals(vec![window]));
        rest = rest.difference(&piece);
        pieces.push(piece);
    }
    pieces
}

/// Picks the index whose complement needs the fewest small pieces, the
/// least such index on ties.
pub fn cert_boundedhaus(c: &OmegaCover, u_scale: &Rational) -> Result<BoundedHausCertificate, CoverError> {
    require_positive(u_scale, "u_scale")?;
    let oracle = c.oracle();
    let mut best: Option<(usize, Vec<RationalIntervalSet>)> = None;
    for n in 0..=c.depth() {
        let pieces = small_pieces(u_scale, &c.set(n).complement());
        if best.as_ref().is_none_or(|(_, b)| pieces.len() < b.len()) {
            let done = pieces.len() == 1;
            best = Some((n, pieces));
            if done {
                break;
            }
        }
    }
    let (index, pieces) = best.expect("covers are nonempty");
    let complement = c.set(index).complement();
    let union = pieces.iter().fold(RationalIntervalSet::empty(), |acc, p| acc.union(p));
    let disjoint = pieces
        .iter()
        .enumerate()
        .all(|(i, p)| pieces[i + 1..].iter().all(|q| !p.intersects(q)));
    let checks = vec![
        Check::exact("every piece is small", pieces.iter().all(|p| oracle.is_small(u_scale, p))),
        Check::exact("pieces partition the complement", disjoint && union == complement),
    ];
    Ok(BoundedHausCertificate {
        u_scale: u_scale.clone(),
        index,
        pieces,
        checks,
    })
}

/// `x ∈ layer(index)` and `y ∈ U_ε(x) ∖ U_𝒢(x)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NotEntourageWitness {
    #[serde(with = "rational::serde_str")]
    pub scale: Rational,
    pub index: usize,
    #[serde(with = "rational::serde_str")]
    pub x: Rational,
    #[serde(with = "rational::serde_str")]
    pub y: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NotEntourageCertificate {
    pub witnesses: Vec<NotEntourageWitness>,
    pub checks: Vec<Check>,
}

impl NotEntourageCertificate {
    pub fn passed(&self) -> bool {
        all_hold(&self.checks)
    }
}

/// For each scale `ε`, exhibits `x` and `y` with `q(x, y) < ε` but
/// `y ∉ U_𝒢(x)`, so that no `U_ε` lies inside `U_𝒢`.
pub fn cert_not_entourage(c: &OmegaCover, probe_scales: &[Rational]) -> Result<NotEntourageCertificate, CoverError> {
    if probe_scales.is_empty() {
        return Err(CoverError::InvalidArgument("no probe scales".into()));
    }
    let oracle = c.oracle();
    let mut witnesses = Vec::with_capacity(probe_scales.len());
    let mut checks = Vec::with_capacity(probe_scales.len());
    for eps in probe_scales {
        require_positive(eps, "probe scale")?;
        let found = (0..c.depth()).find_map(|n| {
            let layer = c.layer(n);
            let y = oracle.image(eps, &layer).difference(c.set(n + 1)).sample_point()?;
            let x = layer
                .intersection(&oracle.preimage(eps, &RationalIntervalSet::point(y.clone())))
                .sample_point()?;
            Some((n, x, y))
        });
        let (index, x, y) = found.ok_or_else(|| CoverError::NoWitness {
            scale: rational::format(eps),
        })?;
        let holds = c.index_of_point(&x)? == index && oracle.dist(&x, &y) < *eps && !c.relation_contains(&x, &y)?;
        checks.push(Check::exact(
            format!("U_{} not inside U_cover", rational::format(eps)),
            holds,
        ));
        witnesses.push(NotEntourageWitness {
            scale: eps.clone(),
            index,
            x,
            y,
        });
    }
    Ok(NotEntourageCertificate { witnesses, checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratcover::cover::{dense_cover, DEFAULT_DEPTH};
    use crate::ratcover::MetricOracle;
    use crate::rational::{dyadic, rat};

    fn flagship() -> OmegaCover {
        dense_cover(&rat(1, 2), DEFAULT_DEPTH).unwrap()
    }

    #[test]
    fn monotonecover_contained_branch() {
        let c = flagship();
        let cert = cert_monotonecover(&c, &RationalIntervalSet::open(rat(1, 4), rat(1, 3))).unwrap();
        assert_eq!(cert.branch, MonotoneCoverBranch::Contained);
        // (1/4,1/3) meets (1/4,1) = sets(1), and lies inside it.
        assert_eq!((cert.g1, cert.g2), (1, Some(1)));
        assert!(cert.passed());
    }

    #[test]
    fn monotonecover_cofinal_branch() {
        let c = flagship();
        let cert = cert_monotonecover(&c, &RationalIntervalSet::ground()).unwrap();
        assert_eq!(cert.branch, MonotoneCoverBranch::Cofinal);
        assert!(cert.target.is_ground());
        assert_eq!(cert.g1, 0);
        assert!(cert.passed());
    }

    #[test]
    fn monotonecover_single_point() {
        let c = flagship();
        let cert = cert_monotonecover(&c, &RationalIntervalSet::point(rat(1, 5))).unwrap();
        assert_eq!(Some(cert.g1), cert.g2);
        assert!(cert.passed());
    }

    #[test]
    fn monotonehaus_contained() {
        let c = flagship();
        let a = RationalIntervalSet::open(rat(1, 100), rat(1, 1)).difference(&RationalIntervalSet::open(rat(1, 3), rat(2, 5)));
        let cert = cert_monotonehaus(&c, &rat(1, 8), &a).unwrap();
        assert_eq!(cert.outcome, MonotoneHausOutcome::Contained { index: 49 });
        assert!(cert.passed());
        let inside = cert_monotonehaus(&c, &rat(1, 8), &c.set(5).clone()).unwrap();
        assert_eq!(inside.outcome, MonotoneHausOutcome::Contained { index: 5 });
    }

    #[test]
    fn monotonehaus_cofinal() {
        let c = flagship();
        let a = RationalIntervalSet::open(rat(0, 1), rat(1, 10)).union(&RationalIntervalSet::closed(rat(1, 2), rat(3, 4)));
        let cert = cert_monotonehaus(&c, &rat(1, 8), &a).unwrap();
        assert!(matches!(cert.outcome, MonotoneHausOutcome::Certified { .. }), "{cert:?}");
        assert!(cert.passed(), "{cert:?}");
        assert!(!cert.witnesses.is_empty());
    }

    #[test]
    fn monotonehaus_hypothesis_fails_at_shallow_truncation() {
        let c = dense_cover(&rat(1, 2), 8).unwrap();
        let a = RationalIntervalSet::open(rat(0, 1), rat(1, 100)).union(&RationalIntervalSet::point(rat(1, 2)));
        let cert = cert_monotonehaus(&c, &rat(1, 1000), &a).unwrap();
        assert!(!cert.hypothesis_holds());
        assert!(!cert.passed());
    }

    #[test]
    fn boundedhaus_flagship() {
        let c = flagship();
        let cert = cert_boundedhaus(&c, &rat(1, 10)).unwrap();
        // (0, 1/10] has diameter exactly 1/10 with 0 not attained.
        assert_eq!(cert.index, 4);
        assert_eq!(cert.pieces.len(), 1);
        assert!(cert.passed());
        let big = cert_boundedhaus(&c, &rat(2, 1)).unwrap();
        assert_eq!((big.index, big.pieces.len()), (0, 1));
        let fine = cert_boundedhaus(&c, &dyadic(8)).unwrap();
        assert!(fine.passed());
    }

    #[test]
    fn boundedhaus_lower_oracle() {
        let c = OmegaCover::new(
            MetricOracle::Lower,
            vec![
                RationalIntervalSet::open(rat(1, 2), rat(1, 1)),
                RationalIntervalSet::open(rat(1, 4), rat(1, 1)),
                RationalIntervalSet::open(rat(1, 8), rat(1, 1)),
            ],
            vec![rat(1, 4), rat(1, 8), rat(1, 8)],
            vec![rat(0, 1)],
        )
        .unwrap();
        let cert = cert_boundedhaus(&c, &rat(1, 16)).unwrap();
        assert_eq!(cert.index, 2);
        assert_eq!(cert.pieces.len(), 2);
        assert!(cert.passed());
    }

    #[test]
    fn small_pieces_handles_attained_infimum() {
        let set = RationalIntervalSet::closed(rat(1, 10), rat(3, 10));
        let pieces = small_pieces(&rat(1, 10), &set);
        assert_eq!(pieces.len(), 3);
        assert_eq!(pieces[0].to_string(), "[1/10,1/5)");
        assert_eq!(pieces[2].to_string(), "{3/10}");
    }

    #[test]
    fn not_entourage_flagship() {
        let c = flagship();
        let scales: Vec<Rational> = (0..=8).map(dyadic).chain([rat(2, 1)]).collect();
        let cert = cert_not_entourage(&c, &scales).unwrap();
        assert!(cert.passed());
        let two = cert.witnesses.last().unwrap();
        assert_eq!(two.index, 0);
        assert!(two.y <= rat(1, 4));
    }

    #[test]
    fn not_entourage_fails_below_truncation() {
        let c = dense_cover(&rat(1, 2), 4).unwrap();
        assert_eq!(
            cert_not_entourage(&c, &[rat(1, 1000)]),
            Err(CoverError::NoWitness { scale: "1/1000".into() })
        );
    }
}

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::certs::{cert_boundedhaus, cert_monotonehaus, BoundedHausCertificate, MonotoneHausCertificate};
use super::check::{all_hold, Check};
use super::cover::{dense_cover, pwm_via_metrics_check, OmegaCover};
use super::interval::{Interval, RationalIntervalSet};
use super::star::{connectivity_certificate, cover_normal_sequence, ConnectivityCertificate, CoverNormalSequence};
use super::CoverError;
use crate::rational::{self, Rational};

/// Denominator of probe endpoints.
pub const PROBE_DENOMINATOR: i64 = 64;

/// Seeded random interval sets with one or two components and endpoints in
/// `{k/64}`. About a third start at `0`, so they are cofinal in covers
/// accumulating there.
pub fn probe_family(seed: u64, count: usize) -> Vec<RationalIntervalSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = PROBE_DENOMINATOR;
    (0..count)
        .map(|_| {
            let components = rng.gen_range(1..=2);
            let mut ends: Vec<i64> = sample(&mut rng, (d - 1) as usize, 2 * components)
                .into_iter()
                .map(|i| i as i64 + 1)
                .collect();
            ends.sort_unstable();
            if rng.gen_bool(1.0 / 3.0) {
                ends[0] = 0;
            }
            let intervals = ends
                .chunks(2)
                .map(|p| {
                    Interval::new(
                        Rational::new(p[0].into(), d.into()),
                        Rational::new(p[1].into(), d.into()),
                        rng.gen_bool(0.5),
                        rng.gen_bool(0.5),
                    )
                })
                .collect();
            RationalIntervalSet::from_intervals(intervals)
        })
        .collect()
}

/// `U_{𝒢_cover} ∩ U_scale`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BaseEntourage {
    pub cover: usize,
    #[serde(with = "rational::serde_str")]
    pub scale: Rational,
}

/// Base of the refined quasi-uniformity generated by `U_{𝒢_j} ∩ U_s`, with
/// the certificates that each base member lifts into the hyperspace of the
/// background quasi-uniformity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RefinedBase {
    pub normal: CoverNormalSequence,
    #[serde(with = "rational::serde_vec")]
    pub background_scales: Vec<Rational>,
    pub base: Vec<BaseEntourage>,
    pub bounded: Vec<BoundedHausCertificate>,
    pub hyperspace: Vec<MonotoneHausCertificate>,
}

impl RefinedBase {
    pub fn covers(&self) -> &[OmegaCover] {
        &self.normal.covers
    }

    pub fn passed(&self) -> bool {
        self.normal.passed()
            && self.bounded.iter().all(BoundedHausCertificate::passed)
            && self.hyperspace.iter().all(MonotoneHausCertificate::passed)
    }
}

fn failed(what: String) -> CoverError {
    CoverError::CertificateFailed { what }
}

/// Builds `k + 1` iterated star covers and certifies every base member
/// `U_{𝒢_j} ∩ U_s` on each probe set. Any failing certificate aborts.
pub fn refined_base(
    c: &OmegaCover,
    k: usize,
    background_scales: &[Rational],
    probes: &[RationalIntervalSet],
    grid: usize,
) -> Result<RefinedBase, CoverError> {
    if background_scales.is_empty() {
        return Err(CoverError::InvalidArgument("no background scales".into()));
    }
    let normal = cover_normal_sequence(c, k, grid)?;
    if let Some(j) = normal.squares.iter().position(|s| !s.passed()) {
        return Err(failed(format!("squared star relation at step {j}")));
    }
    let mut base = Vec::new();
    let mut bounded = Vec::new();
    for (j, cover) in normal.covers.iter().enumerate() {
        for s in background_scales {
            let cert = cert_boundedhaus(cover, s)?;
            if !cert.passed() {
                return Err(failed(format!("bounded complement of cover {j} at scale {}", rational::format(s))));
            }
            bounded.push(cert);
            base.push(BaseEntourage { cover: j, scale: s.clone() });
        }
    }
    let hyperspace = base
        .par_iter()
        .flat_map_iter(|b| probes.iter().map(move |p| (b, p)))
        .map(|(b, p)| {
            let cert = cert_monotonehaus(&normal.covers[b.cover], &b.scale, p)?;
            if !cert.passed() {
                return Err(failed(format!(
                    "hyperspace entourage of cover {} at scale {} on {}: {:?}",
                    b.cover,
                    rational::format(&b.scale),
                    p,
                    cert.outcome
                )));
            }
            Ok(cert)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RefinedBase {
        normal,
        background_scales: background_scales.to_vec(),
        base,
        bounded,
        hyperspace,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DenseCertificate {
    #[serde(with = "rational::serde_str")]
    pub eps: Rational,
    pub depth: usize,
    #[serde(with = "rational::serde_vec")]
    pub witness_scales: Vec<Rational>,
    pub connectivity: ConnectivityCertificate,
    pub bounded: Vec<BoundedHausCertificate>,
    pub checks: Vec<Check>,
}

impl DenseCertificate {
    pub fn passed(&self) -> bool {
        all_hold(&self.checks)
            && all_hold(&self.connectivity.checks)
            && self.bounded.iter().all(BoundedHausCertificate::passed)
    }
}

/// The cover `G_n = {y : q(y, 0) > eps/n}` of `(0,1) ∩ ℚ`, `n ≥ 1`, stored
/// at index `n - 1`, with its certificates. Complements are certified
/// bounded at every scale in `scales`.
pub fn dense_scenario(
    eps: &Rational,
    depth: usize,
    scales: &[Rational],
) -> Result<(OmegaCover, DenseCertificate), CoverError> {
    let cover = dense_cover(eps, depth)?;
    let oracle = cover.oracle();
    let at = |i: usize| eps / Rational::from_integer((i as i64 + 1).into());
    let witness_scales: Vec<Rational> = (0..depth).map(|i| at(i) - at(i + 1)).collect();
    let increasing = (0..depth).all(|n| cover.set(n).is_subset(cover.set(n + 1)) && cover.set(n) != cover.set(n + 1));
    let well_inside =
        (0..depth).all(|n| oracle.image(&witness_scales[n], cover.set(n)).is_subset(cover.set(n + 1)));
    let proper = cover.sets().iter().all(|s| !s.is_ground());
    let checks = vec![
        Check::exact("sets strictly increase", increasing),
        Check::exact("each set is well inside its successor at its witness scale", well_inside),
        Check::exact("no set equals the ground", proper),
        Check::exact("scale family realizes the cover", pwm_via_metrics_check(&cover)),
    ];
    let smallest = cover.scales().last().expect("covers are nonempty").clone();
    let connectivity = connectivity_certificate(oracle, &smallest)?;
    let bounded = scales
        .iter()
        .map(|s| cert_boundedhaus(&cover, s))
        .collect::<Result<Vec<_>, _>>()?;
    let cert = DenseCertificate {
        eps: eps.clone(),
        depth,
        witness_scales,
        connectivity,
        bounded,
        checks,
    };
    Ok((cover, cert))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratcover::cover::DEFAULT_DEPTH;
    use crate::rational::rat;

    #[test]
    fn probes_are_deterministic_and_nonempty() {
        let a = probe_family(7, 50);
        assert_eq!(a, probe_family(7, 50));
        assert!(a.iter().all(|p| !p.is_empty()));
        let c = dense_cover(&rat(1, 2), 8).unwrap();
        let cofinal = a.iter().filter(|p| c.is_cofinal(p)).count();
        assert!(cofinal > 5 && cofinal < 45);
    }

    #[test]
    fn flagship_dense_scenario() {
        let (c, cert) = dense_scenario(&rat(1, 2), DEFAULT_DEPTH, &[rat(1, 4), rat(1, 16)]).unwrap();
        assert!(cert.passed());
        assert_eq!(c.set(0), &RationalIntervalSet::open(rat(1, 2), rat(1, 1)));
        assert_eq!(cert.witness_scales[0], rat(1, 4));
        assert_eq!(cert.witness_scales[1], rat(1, 12));
        assert!(dense_scenario(&rat(1, 1), 4, &[]).is_err());
    }

    #[test]
    fn refined_base_trivial_scale() {
        let c = dense_cover(&rat(1, 2), 16).unwrap();
        let probes = probe_family(1, 4);
        let r = refined_base(&c, 0, &[rat(1, 1)], &probes, 64).unwrap();
        assert_eq!(r.base.len(), 1);
        assert!(r.passed());
    }

    #[test]
    fn refined_base_flagship() {
        let c = dense_cover(&rat(1, 2), DEFAULT_DEPTH).unwrap();
        let probes = probe_family(2, 6);
        let r = refined_base(&c, 2, &[rat(1, 4), rat(1, 16)], &probes, 256).unwrap();
        assert_eq!(r.base.len(), 6);
        assert_eq!(r.hyperspace.len(), 36);
        assert!(r.passed());
    }
}

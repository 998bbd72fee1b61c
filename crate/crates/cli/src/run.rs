use anyhow::{bail, Result};
use qusp_core::hyper::{enumerate_preorders, qh_local_criterion, qh_singular_scan, subset_label};
use qusp_core::metrize::{random_normal_sequence, sandwich_check};
use qusp_core::ratcover::{
    cert_monotonecover, cert_not_entourage, dense_scenario, probe_family, refined_base, CoverError,
};
use qusp_core::relcore::all_masks;
use qusp_core::{kelley_metric, qh_equivalent, qh_finer, Error, FiniteQuasiUniformity, Subset};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::scenario::{DenseWitness, Scenario};

/// What a computation established. Input problems never reach this type;
/// they surface as `Err` and map to exit code 2.
pub struct Outcome {
    pub pass: bool,
    pub results: Value,
    pub certificates: Value,
}

impl Outcome {
    fn new(pass: bool, results: Value, certificates: Value) -> Self {
        Outcome { pass, results, certificates }
    }

    /// A certificate that failed inside the library, reported as a
    /// counterexample with the library's explanation.
    fn failure(e: &Error) -> Self {
        Outcome::new(false, json!({ "failure": e.to_string() }), Value::Null)
    }
}

/// Certificate failures are mathematical answers; everything else is a
/// problem with the request.
fn is_counterexample(e: &Error) -> bool {
    matches!(
        e,
        Error::QuadrupleViolated(..)
            | Error::Cover(
                CoverError::CertificateFailed { .. }
                    | CoverError::NoWitness { .. }
                    | CoverError::NotUniformlyConnected { .. }
                    | CoverError::UniformlyIsolated { .. }
                    | CoverError::ImageCollides { .. }
                    | CoverError::WitnessFails { .. }
            )
    )
}

fn settle(r: std::result::Result<Outcome, Error>) -> Result<Outcome> {
    match r {
        Ok(o) => Ok(o),
        Err(e) if is_counterexample(&e) => Ok(Outcome::failure(&e)),
        Err(e) => Err(e.into()),
    }
}

pub fn run(s: &Scenario) -> Result<Outcome> {
    settle(match s {
        Scenario::FiniteCompare(f) => finite_compare(&f.q1, &f.q2),
        Scenario::SingularScan(s) => singular_scan(s.n),
        Scenario::KelleyDemo(k) => kelley_demo(k.seed, k.n, k.depth),
        Scenario::DenseWitness(d) => dense_witness(d),
    })
}

fn finite_compare(q1: &FiniteQuasiUniformity, q2: &FiniteQuasiUniformity) -> Result<Outcome, Error> {
    let verdict = qh_equivalent(q1, q2)?;
    let forward = qh_finer(q1, q2)?;
    let backward = qh_finer(q2, q1)?;
    let ground = q1.ground();
    let n = ground.size();
    let (m1, m2) = (q1.min_entourage(), q2.min_entourage());
    let mut per_subset = Vec::with_capacity(1 << n);
    let (mut all_fwd, mut all_bwd) = (true, true);
    for mask in all_masks(n) {
        let a = Subset::from_mask(n, mask);
        let f = qh_local_criterion(m1, m2, &a)?;
        let b = qh_local_criterion(m2, m1, &a)?;
        all_fwd &= f;
        all_bwd &= b;
        per_subset.push(json!({ "subset": subset_label(ground, mask), "forward": f, "backward": b }));
    }
    let agrees = all_fwd == forward && all_bwd == backward;
    let results = json!({
        "finer_forward": verdict.finer_forward,
        "finer_backward": verdict.finer_backward,
        "equivalent": verdict.equivalent(),
        "counterexample": verdict.counterexample,
        "local_criterion_agrees": agrees,
    });
    Ok(Outcome::new(
        verdict.equivalent() && agrees,
        results,
        json!({ "local_criterion": per_subset }),
    ))
}

fn singular_scan(n: usize) -> Result<Outcome, Error> {
    let report = qh_singular_scan(n)?;
    Ok(Outcome::new(
        report.collisions.is_empty(),
        serde_json::to_value(&report).expect("serializable"),
        Value::Null,
    ))
}

fn kelley_demo(seed: u64, n: usize, depth: usize) -> Result<Outcome, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seq = random_normal_sequence(&mut rng, n, depth)?;
    let q = kelley_metric(&seq)?;
    let sandwich = sandwich_check(&seq, &q);
    Ok(Outcome::new(
        sandwich.passed(),
        json!({ "n": n, "depth": depth, "sandwich": sandwich }),
        json!({ "levels": seq.levels(), "metric": q }),
    ))
}

fn dense_witness(d: &DenseWitness) -> Result<Outcome, Error> {
    let (cover, dense) = dense_scenario(&d.eps, d.depth, &d.scales)?;
    let not_entourage = cert_not_entourage(&cover, &d.scales)?;
    let probes = d
        .probes
        .as_ref()
        .map(|p| probe_family(p.seed, p.count))
        .unwrap_or_default();
    let monotone = probes
        .iter()
        .map(|p| cert_monotonecover(&cover, p))
        .collect::<Result<Vec<_>, _>>()?;
    let refined = refined_base(&cover, d.star_steps, &d.scales, &probes, d.grid)?;
    let monotone_passed = monotone.iter().filter(|c| c.passed()).count();
    let pass = dense.passed()
        && not_entourage.passed()
        && monotone_passed == monotone.len()
        && refined.passed();
    let results = json!({
        "dense": dense.passed(),
        "normal_sequence": refined.normal.passed(),
        "grid_violations": refined.normal.squares.iter().map(|s| s.grid_violations.len()).sum::<usize>(),
        "not_entourage_witnesses": not_entourage.witnesses.len(),
        "monotonecover": { "probes": monotone.len(), "passed": monotone_passed },
        "refined_base": { "entourages": refined.base.len(), "hyperspace_certificates": refined.hyperspace.len() },
    });
    Ok(Outcome::new(
        pass,
        results,
        json!({
            "cover": cover,
            "dense": dense,
            "not_entourage": not_entourage,
            "monotonecover": monotone,
            "refined_base": refined,
        }),
    ))
}

/// `enumerate <n>`: counts preorders, optionally listing them as row strings.
pub fn enumerate(n: usize, list: bool) -> Result<Outcome> {
    let all = enumerate_preorders(n)?;
    let listing = if list {
        json!(all.iter().map(|p| p.row_strings()).collect::<Vec<_>>())
    } else {
        Value::Null
    };
    Ok(Outcome::new(true, json!({ "n": n, "count": all.len() }), listing))
}

/// DOT rendering of both topologies in a `finite_compare` scenario.
pub fn dot(s: &Scenario) -> Result<String> {
    let Scenario::FiniteCompare(f) = s else {
        bail!("dot output is only available for finite_compare scenarios, not {}", s.kind());
    };
    Ok(format!("{}{}", f.q1.topology().to_dot("q1")?, f.q2.topology().to_dot("q2")?))
}

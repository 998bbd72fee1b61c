//! Quasi-pseudometrics from normal sequences (Kelley's construction) on
//! finite sets, with exact dyadic arithmetic.
//!
//! A normal sequence `L0, L1, ..` is first thinned to its even levels
//! `V_k = L_{2k}`, which satisfy `V_{k+1}⁴ ⊆ V_k`. The weight of a pair is
//! `2^-k` for the largest `k` with the pair in `V_k`, `cap` if it is in no
//! level, and `0` on the tail relation. The metric is the chain infimum of
//! weights (all-pairs shortest paths), and satisfies
//! `V_{k+1} ⊆ {d < 2^-k} ⊆ V_k`.
//!
//! A finite ladder stands for the infinite one obtained by repeating a tail
//! relation forever: the deepest level itself when it is a preorder, the
//! diagonal otherwise. Both completions are again normal sequences, so the
//! sandwich holds at every finite level.

use std::sync::Arc;

use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quniform::FiniteQuasiUniformity;
use crate::rational::{self, dyadic, Rational};
use crate::relcore::{same_ground, GroundSet, NormalSequence, Relation, Subset};

/// Exact, possibly asymmetric, finite distance: `d(x,x) = 0`, `d >= 0` and
/// the triangle inequality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteQuasiPseudometric {
    ground: Arc<GroundSet>,
    dist: Vec<Vec<Rational>>,
}

impl FiniteQuasiPseudometric {
    pub fn new(ground: &Arc<GroundSet>, dist: Vec<Vec<Rational>>) -> Result<Self> {
        let n = ground.size();
        if dist.len() != n || dist.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidMetric(format!("matrix must be {n}×{n}")));
        }
        let q = FiniteQuasiPseudometric {
            ground: ground.clone(),
            dist,
        };
        if let Some(msg) = q.axiom_violation() {
            return Err(Error::InvalidMetric(msg));
        }
        Ok(q)
    }

    /// First violated axiom, if any.
    pub fn axiom_violation(&self) -> Option<String> {
        let n = self.size();
        let g = &self.ground;
        for x in 0..n {
            if !self.dist[x][x].is_zero() {
                return Some(format!("d({0},{0}) != 0", g.label(x)));
            }
            for y in 0..n {
                if self.dist[x][y] < Rational::zero() {
                    return Some(format!("d({},{}) < 0", g.label(x), g.label(y)));
                }
                for z in 0..n {
                    if self.dist[x][z] > &self.dist[x][y] + &self.dist[y][z] {
                        return Some(format!(
                            "triangle inequality fails for {}, {}, {}",
                            g.label(x),
                            g.label(y),
                            g.label(z)
                        ));
                    }
                }
            }
        }
        None
    }

    pub fn ground(&self) -> &Arc<GroundSet> {
        &self.ground
    }

    pub fn size(&self) -> usize {
        self.dist.len()
    }

    pub fn dist(&self, x: usize, y: usize) -> &Rational {
        &self.dist[x][y]
    }

    pub fn matrix(&self) -> &[Vec<Rational>] {
        &self.dist
    }

    /// `{x : d(a, x) < eps for some a ∈ A}`.
    pub fn ball(&self, a: &Subset, eps: &Rational) -> Result<Subset> {
        if !rational::is_positive(eps) {
            return Err(Error::InvalidArgument("ball radius must be positive".into()));
        }
        let n = self.size();
        Ok(Subset::from_indices(
            n,
            (0..n).filter(|&x| a.iter().any(|p| &self.dist[p][x] < eps)),
        ))
    }

    /// `q(x, A) = min_{a ∈ A} q(x, a)`.
    pub fn dist_point_set(&self, x: usize, a: &Subset) -> Result<Rational> {
        a.iter()
            .map(|p| &self.dist[x][p])
            .min()
            .cloned()
            .ok_or(Error::EmptySet)
    }

    pub fn conjugate(&self) -> Self {
        let n = self.size();
        FiniteQuasiPseudometric {
            ground: self.ground.clone(),
            dist: (0..n)
                .map(|x| (0..n).map(|y| self.dist[y][x].clone()).collect())
                .collect(),
        }
    }

    /// `q ∨ q⁻¹`.
    pub fn symmetrize(&self) -> Self {
        let n = self.size();
        FiniteQuasiPseudometric {
            ground: self.ground.clone(),
            dist: (0..n)
                .map(|x| (0..n).map(|y| rational::max(&self.dist[x][y], &self.dist[y][x])).collect())
                .collect(),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.size();
        (0..n).all(|x| (0..n).all(|y| self.dist[x][y] == self.dist[y][x]))
    }

    /// `{(x, y) : d(x, y) < eps}`.
    pub fn entourage(&self, eps: &Rational) -> Relation {
        let n = self.size();
        Relation::from_pairs(
            &self.ground,
            (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).filter(|&(x, y)| &self.dist[x][y] < eps),
        )
    }

    /// On a finite set the entourages `{d < eps}` stabilise at `{d = 0}` once
    /// `eps` is below the smallest positive distance; that preorder is the
    /// minimum of the induced quasi-uniformity.
    pub fn induced_quasi_uniformity(&self) -> FiniteQuasiUniformity {
        let n = self.size();
        let zero = Relation::from_pairs(
            &self.ground,
            (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).filter(|&(x, y)| self.dist[x][y].is_zero()),
        );
        FiniteQuasiUniformity::from_preorder(zero).expect("zero set of a quasi-pseudometric is a preorder")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MetricJson {
    labels: Vec<String>,
    dist: Vec<Vec<String>>,
}

impl Serialize for FiniteQuasiPseudometric {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MetricJson {
            labels: self.ground.labels().to_vec(),
            dist: self
                .dist
                .iter()
                .map(|row| row.iter().map(rational::format).collect())
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FiniteQuasiPseudometric {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = MetricJson::deserialize(d)?;
        let ground = GroundSet::new(j.labels).map_err(D::Error::custom)?;
        let dist = j
            .dist
            .iter()
            .map(|row| row.iter().map(|s| rational::parse(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        FiniteQuasiPseudometric::new(&ground, dist).map_err(D::Error::custom)
    }
}

/// Pairwise weights `inf {2^-k : (x,y) ∈ V_k}` over the completed ladder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightFunction {
    ground: Arc<GroundSet>,
    weight: Vec<Vec<Rational>>,
}

impl WeightFunction {
    pub fn weight(&self, x: usize, y: usize) -> &Rational {
        &self.weight[x][y]
    }

    pub fn matrix(&self) -> &[Vec<Rational>] {
        &self.weight
    }
}

/// Levels `L0, L2, L4, ..`.
pub fn every_second_level(seq: &NormalSequence) -> Vec<Relation> {
    seq.levels().iter().step_by(2).cloned().collect()
}

/// Checks `V_{k+1}⁴ ⊆ V_k` along a ladder of reflexive relations.
pub fn check_quadruple(ladder: &[Relation]) -> Result<()> {
    let first = ladder
        .first()
        .ok_or_else(|| Error::NotNormalSequence("empty ladder".into()))?;
    for (k, level) in ladder.iter().enumerate() {
        same_ground(first.ground(), level.ground())?;
        if level.first_non_reflexive().is_some() {
            return Err(Error::NotNormalSequence(format!("level {k} is not reflexive")));
        }
    }
    for k in 0..ladder.len() - 1 {
        if !ladder[k + 1].power(4).is_subset(&ladder[k]) {
            return Err(Error::QuadrupleViolated(k + 1, k));
        }
    }
    Ok(())
}

/// Relation repeated below the deepest level: that level if it is a
/// preorder, else the diagonal.
pub fn tail_relation(ladder: &[Relation]) -> Relation {
    let last = ladder.last().expect("nonempty ladder");
    if last.is_transitive() {
        last.clone()
    } else {
        Relation::identity(last.ground())
    }
}

fn ladder_weights(ladder: &[Relation], cap: &Rational) -> WeightFunction {
    let ground = ladder[0].ground().clone();
    let n = ground.size();
    let tail = tail_relation(ladder);
    let weight = (0..n)
        .map(|x| {
            (0..n)
                .map(|y| {
                    if tail.contains(x, y) {
                        Rational::zero()
                    } else {
                        match (0..ladder.len()).rev().find(|&k| ladder[k].contains(x, y)) {
                            Some(k) => dyadic(k as u32),
                            None => cap.clone(),
                        }
                    }
                })
                .collect()
        })
        .collect();
    WeightFunction { ground, weight }
}

/// Weights of the even sub-ladder of `seq`.
pub fn weight_function(seq: &NormalSequence, cap: &Rational) -> Result<WeightFunction> {
    if !rational::is_positive(cap) {
        return Err(Error::InvalidArgument("cap must be positive".into()));
    }
    Ok(ladder_weights(&every_second_level(seq), cap))
}

/// Kelley metric of a normal sequence with the default cap `1`.
pub fn kelley_metric(seq: &NormalSequence) -> Result<FiniteQuasiPseudometric> {
    kelley_metric_with_cap(seq, &Rational::one())
}

pub fn kelley_metric_with_cap(seq: &NormalSequence, cap: &Rational) -> Result<FiniteQuasiPseudometric> {
    kelley_metric_from_ladder(&every_second_level(seq), cap)
}

/// Kelley metric of a ladder already satisfying `V_{k+1}⁴ ⊆ V_k`.
///
/// `cap` must be at least `1`: a smaller distance for pairs outside `V_0`
/// would break `{d < 1} ⊆ V_0`.
pub fn kelley_metric_from_ladder(ladder: &[Relation], cap: &Rational) -> Result<FiniteQuasiPseudometric> {
    check_quadruple(ladder)?;
    if cap < &Rational::one() {
        return Err(Error::InvalidArgument("cap must be at least 1".into()));
    }
    let w = ladder_weights(ladder, cap);
    let n = w.ground.size();
    let mut d = w.weight;
    for k in 0..n {
        for x in 0..n {
            for y in 0..n {
                let via = &d[x][k] + &d[k][y];
                if via < d[x][y] {
                    d[x][y] = via;
                }
            }
        }
    }
    Ok(FiniteQuasiPseudometric {
        ground: w.ground,
        dist: d,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SandwichViolation {
    pub k: usize,
    /// `"lower"`: `L_{2k+2} ⊄ {d < 2^-k}`; `"upper"`: `{d < 2^-k} ⊄ L_{2k}`.
    pub side: &'static str,
    pub pair: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SandwichReport {
    pub levels_checked: usize,
    pub axioms_hold: bool,
    pub violations: Vec<SandwichViolation>,
}

impl SandwichReport {
    pub fn passed(&self) -> bool {
        self.axioms_hold && self.violations.is_empty()
    }
}

/// Checks `L_{2k+2} ⊆ {d < 2^-k} ⊆ L_{2k}` for every `k` with `2k+2` in range,
/// plus the quasi-pseudometric axioms.
pub fn sandwich_check(seq: &NormalSequence, q: &FiniteQuasiPseudometric) -> SandwichReport {
    let levels = seq.levels();
    let n = q.size();
    let mut violations = Vec::new();
    let mut checked = 0;
    let mut k = 0;
    while 2 * k + 2 < levels.len() {
        checked += 1;
        let below = q.entourage(&dyadic(k as u32));
        for x in 0..n {
            for y in 0..n {
                if levels[2 * k + 2].contains(x, y) && !below.contains(x, y) {
                    violations.push(SandwichViolation { k, side: "lower", pair: (x, y) });
                }
                if below.contains(x, y) && !levels[2 * k].contains(x, y) {
                    violations.push(SandwichViolation { k, side: "upper", pair: (x, y) });
                }
            }
        }
        k += 1;
    }
    SandwichReport {
        levels_checked: checked,
        axioms_hold: q.axiom_violation().is_none(),
        violations,
    }
}

/// A random normal sequence with `depth` levels on `n` points, built from the
/// deepest level up: each level is the square of the next plus random pairs.
/// Half of the draws close the deepest level to a preorder.
pub fn random_normal_sequence<R: Rng>(rng: &mut R, n: usize, depth: usize) -> Result<NormalSequence> {
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be positive".into()));
    }
    let ground = GroundSet::with_size(n)?;
    let sprinkle = |rng: &mut R, r: &mut Relation, p: f64| {
        for x in 0..n {
            for y in 0..n {
                if x != y && rng.gen_bool(p) {
                    r.insert(x, y);
                }
            }
        }
    };
    let mut bottom = Relation::identity(&ground);
    sprinkle(rng, &mut bottom, 0.1);
    if rng.gen_bool(0.5) {
        bottom = bottom.reflexive_transitive_closure();
    }
    let mut levels = vec![bottom];
    for _ in 1..depth {
        let below = levels.last().unwrap();
        let mut next = below.compose(below)?;
        sprinkle(rng, &mut next, 0.08);
        levels.push(next);
    }
    levels.reverse();
    NormalSequence::new(levels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn g(n: usize) -> Arc<GroundSet> {
        GroundSet::with_size(n).unwrap()
    }

    #[test]
    fn constant_preorder_sequence() {
        let g3 = g(3);
        let r = Relation::reflexive_with(&g3, [(0, 1)]);
        let seq = NormalSequence::new(vec![r.clone(); 4]).unwrap();
        let w = weight_function(&seq, &Rational::one()).unwrap();
        let d = kelley_metric(&seq).unwrap();
        for x in 0..3 {
            for y in 0..3 {
                let expected = if r.contains(x, y) { Rational::zero() } else { Rational::one() };
                assert_eq!(w.weight(x, y), &expected);
                assert_eq!(d.dist(x, y), &expected);
            }
        }
    }

    #[test]
    fn two_point_ladder_by_hand() {
        let g2 = g(2);
        let full = Relation::full(&g2);
        let ab = Relation::reflexive_with(&g2, [(0, 1)]);
        let id = Relation::identity(&g2);
        let seq = NormalSequence::new(vec![full.clone(), full, ab.clone(), ab, id]).unwrap();
        // Even levels: X×X, {Δ,(a,b)}, Δ.
        let d = kelley_metric(&seq).unwrap();
        assert_eq!(d.dist(0, 1), &rat(1, 2));
        assert_eq!(d.dist(1, 0), &Rational::one());
        assert!(sandwich_check(&seq, &d).passed());
    }

    #[test]
    fn non_transitive_tail_falls_back_to_diagonal() {
        let g3 = g(3);
        let chain = Relation::reflexive_with(&g3, [(0, 1), (1, 2)]);
        let seq = NormalSequence::new(vec![Relation::full(&g3), chain.clone()]).unwrap();
        // One even level: X×X, whose tail is itself (transitive).
        assert!(kelley_metric(&seq).unwrap().dist(0, 2).is_zero());
        let seq = NormalSequence::new(vec![Relation::full(&g3), Relation::full(&g3), chain.clone()]).unwrap();
        let d = kelley_metric(&seq).unwrap();
        assert_eq!(d.dist(0, 1), &rat(1, 2));
        assert_eq!(d.dist(0, 2), &Rational::one());
        assert!(tail_relation(&every_second_level(&seq)).is_subset(&chain));
    }

    #[test]
    fn weights_on_diagonal_are_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let seq = random_normal_sequence(&mut rng, 5, 5).unwrap();
        let w = weight_function(&seq, &Rational::one()).unwrap();
        for x in 0..5 {
            assert!(w.weight(x, x).is_zero());
        }
    }

    #[test]
    fn quadruple_condition_is_validated() {
        let g3 = g(3);
        let chain = Relation::reflexive_with(&g3, [(0, 1), (1, 2)]);
        let r = kelley_metric_from_ladder(&[chain.clone(), chain], &Rational::one());
        assert_eq!(r, Err(Error::QuadrupleViolated(1, 0)));
        assert!(kelley_metric_from_ladder(&[Relation::full(&g3)], &rat(1, 2)).is_err());
    }

    #[test]
    fn ball_examples() {
        let g2 = g(2);
        let q = FiniteQuasiPseudometric::new(
            &g2,
            vec![vec![rat(0, 1), rat(1, 2)], vec![rat(1, 1), rat(0, 1)]],
        )
        .unwrap();
        let a = Subset::from_indices(2, [0]);
        assert_eq!(q.ball(&a, &rat(1, 2)).unwrap(), a);
        assert_eq!(q.ball(&a, &rat(3, 4)).unwrap(), Subset::full(2));
        assert!(q.ball(&Subset::empty(2), &rat(1, 1)).unwrap().is_empty());
        assert!(q.ball(&a, &Rational::zero()).is_err());
    }

    #[test]
    fn dist_point_set_examples() {
        let g3 = g(3);
        let half = rat(1, 2);
        let quarter = rat(1, 4);
        let q = FiniteQuasiPseudometric::new(
            &g3,
            vec![
                vec![Rational::zero(), half.clone(), quarter.clone()],
                vec![half.clone(), Rational::zero(), quarter.clone()],
                vec![quarter.clone(), quarter.clone(), Rational::zero()],
            ],
        )
        .unwrap();
        assert_eq!(q.dist_point_set(0, &Subset::from_indices(3, [1, 2])).unwrap(), quarter);
        assert!(q.dist_point_set(0, &Subset::full(3)).unwrap().is_zero());
        assert!(q.dist_point_set(1, &Subset::from_indices(3, [1])).unwrap().is_zero());
        assert_eq!(q.dist_point_set(0, &Subset::empty(3)), Err(Error::EmptySet));
    }

    #[test]
    fn conjugate_and_symmetrize() {
        let g2 = g(2);
        let q = FiniteQuasiPseudometric::new(
            &g2,
            vec![vec![rat(0, 1), rat(1, 1)], vec![rat(0, 1), rat(0, 1)]],
        )
        .unwrap();
        assert_eq!(q.conjugate().dist(1, 0), &Rational::one());
        assert!(q.conjugate().dist(0, 1).is_zero());
        let s = q.symmetrize();
        assert!(s.is_symmetric());
        assert_eq!(s.dist(1, 0), &Rational::one());
        assert_eq!(s.symmetrize(), s);
        assert_eq!(s.conjugate(), s);
    }

    #[test]
    fn symmetrized_topology_is_join() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let seq = random_normal_sequence(&mut rng, 4, 5).unwrap();
            let q = kelley_metric(&seq).unwrap();
            let lhs = q.symmetrize().induced_quasi_uniformity().topology();
            let rhs = q
                .induced_quasi_uniformity()
                .topology()
                .join(&q.conjugate().induced_quasi_uniformity().topology())
                .unwrap();
            assert_eq!(lhs.opens().unwrap(), rhs.opens().unwrap());
        }
    }

    #[test]
    fn rejects_invalid_matrices() {
        let g2 = g(2);
        let bad = vec![vec![rat(1, 1), rat(0, 1)], vec![rat(0, 1), rat(0, 1)]];
        assert!(FiniteQuasiPseudometric::new(&g2, bad).is_err());
        let g3 = g(3);
        let z = Rational::zero;
        let tri = vec![
            vec![z(), rat(1, 8), rat(1, 1)],
            vec![z(), z(), rat(1, 8)],
            vec![z(), z(), z()],
        ];
        assert!(FiniteQuasiPseudometric::new(&g3, tri).is_err());
    }

    #[test]
    fn metric_json_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let q = kelley_metric(&random_normal_sequence(&mut rng, 3, 4).unwrap()).unwrap();
        let text = serde_json::to_string(&q).unwrap();
        assert!(text.contains("\"0/1\""));
        assert_eq!(serde_json::from_str::<FiniteQuasiPseudometric>(&text).unwrap(), q);
    }
}

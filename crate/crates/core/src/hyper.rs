//! The Hausdorff hyperspace construction on `P(X)` and exact QH-comparison.
//!
//! Points of `P(X)` are subset masks (bit `i` = point `i`); `∅` is included,
//! so `U_H(∅) = {∅}` for every `U`.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quniform::FiniteQuasiUniformity;
use crate::relcore::{all_masks, same_ground, GroundSet, Relation, Subset};

pub const MAX_HYPER_POINTS: usize = 16;
pub const MAX_ENUMERATE_POINTS: usize = 5;
pub const MAX_SCAN_POINTS: usize = 4;

/// A relation on `P(X)`; row `A` holds the masks `B` with `(A, B)` in it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HyperRelation {
    base: Arc<GroundSet>,
    rows: Vec<Subset>,
}

fn guard(n: usize) -> Result<()> {
    if n > MAX_HYPER_POINTS {
        return Err(Error::TooLarge {
            what: "hyperspace base",
            size: n,
            limit: MAX_HYPER_POINTS,
        });
    }
    Ok(())
}

/// `R(A)` as a mask for every mask `A`, built incrementally from the lowest bit.
fn image_table(r: &Relation) -> Vec<u64> {
    let n = r.size();
    let rows: Vec<u64> = r.rows().iter().map(|s| s.to_mask().expect("n <= 16")).collect();
    let mut table = vec![0u64; 1 << n];
    for m in 1..(1u64 << n) {
        let low = m.trailing_zeros() as usize;
        table[m as usize] = table[(m & (m - 1)) as usize] | rows[low];
    }
    table
}

#[derive(Clone, Copy)]
enum Part {
    Minus,
    Plus,
    Both,
}

fn build(u: &Relation, part: Part) -> Result<HyperRelation> {
    let n = u.size();
    guard(n)?;
    let size = 1usize << n;
    let img = image_table(u);
    let inv = image_table(&u.inverse());
    let rows = (0..size as u64)
        .into_par_iter()
        .map(|a| {
            let mut row = Subset::empty(size);
            for b in 0..size as u64 {
                let minus = a & !inv[b as usize] == 0;
                let plus = b & !img[a as usize] == 0;
                let keep = match part {
                    Part::Minus => minus,
                    Part::Plus => plus,
                    Part::Both => minus && plus,
                };
                if keep {
                    row.insert(b as usize);
                }
            }
            row
        })
        .collect();
    Ok(HyperRelation {
        base: u.ground().clone(),
        rows,
    })
}

/// `U₋ = {(A, B) : A ⊆ U⁻¹(B)}`.
pub fn hyper_minus(u: &Relation) -> Result<HyperRelation> {
    build(u, Part::Minus)
}

/// `U₊ = {(A, B) : B ⊆ U(A)}`.
pub fn hyper_plus(u: &Relation) -> Result<HyperRelation> {
    build(u, Part::Plus)
}

/// `U_H = U₋ ∩ U₊`.
pub fn hyper_h(u: &Relation) -> Result<HyperRelation> {
    build(u, Part::Both)
}

/// Label of a subset point of `P(X)`, e.g. `{a,c}`.
pub fn subset_label(base: &GroundSet, mask: u64) -> String {
    let inner: Vec<&str> = (0..base.size())
        .filter(|&i| mask >> i & 1 == 1)
        .map(|i| base.label(i))
        .collect();
    format!("{{{}}}", inner.join(","))
}

pub fn power_set_ground(base: &GroundSet) -> Result<Arc<GroundSet>> {
    guard(base.size())?;
    GroundSet::new(all_masks(base.size()).map(|m| subset_label(base, m)))
}

impl HyperRelation {
    pub fn base(&self) -> &Arc<GroundSet> {
        &self.base
    }

    pub fn points(&self) -> usize {
        self.rows.len()
    }

    pub fn contains(&self, a: u64, b: u64) -> bool {
        self.rows[a as usize].contains(b as usize)
    }

    /// `{B : (A, B) ∈ self}`.
    pub fn successors(&self, a: u64) -> &Subset {
        &self.rows[a as usize]
    }

    pub fn is_subset(&self, other: &HyperRelation) -> bool {
        self.rows.len() == other.rows.len()
            && self.rows.iter().zip(&other.rows).all(|(a, b)| a.is_subset(b))
    }

    pub fn intersection(&self, other: &HyperRelation) -> Result<HyperRelation> {
        same_ground(&self.base, &other.base)?;
        Ok(HyperRelation {
            base: self.base.clone(),
            rows: self
                .rows
                .iter()
                .zip(&other.rows)
                .map(|(a, b)| a.intersection(b))
                .collect(),
        })
    }

    /// The same incidence as a plain relation on the `2ⁿ`-point set `P(X)`.
    pub fn to_relation(&self) -> Result<Relation> {
        let ground = power_set_ground(&self.base)?;
        Relation::from_rows(&ground, self.rows.clone())
    }

    /// Restriction to singletons, read back as a relation on `X`.
    pub fn restrict_to_singletons(&self) -> Relation {
        let n = self.base.size();
        let mut r = Relation::empty(&self.base);
        for x in 0..n {
            for y in 0..n {
                if self.contains(1 << x, 1 << y) {
                    r.insert(x, y);
                }
            }
        }
        r
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.rows.len()).all(|a| self.rows[a].contains(a))
    }

    pub fn is_transitive(&self) -> bool {
        self.rows.iter().all(|row| {
            let mut reach = Subset::empty(self.rows.len());
            for b in row.iter() {
                reach.union_with(&self.rows[b]);
            }
            reach.is_subset(row)
        })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HyperRelationJson {
    n: usize,
    labels: Vec<String>,
    /// Keyed by the subset `A` as a 0/1 string in label order; each value
    /// lists `(A, B)` membership for `B` in increasing mask order.
    rows: BTreeMap<String, String>,
}

fn mask_key(n: usize, mask: u64) -> String {
    (0..n).map(|i| if mask >> i & 1 == 1 { '1' } else { '0' }).collect()
}

fn parse_mask_key(n: usize, key: &str) -> Result<u64> {
    if key.len() != n {
        return Err(Error::Parse(format!("subset key {key:?} must have length {n}")));
    }
    key.chars().enumerate().try_fold(0u64, |m, (i, c)| match c {
        '1' => Ok(m | 1 << i),
        '0' => Ok(m),
        _ => Err(Error::Parse(format!("bad subset key {key:?}"))),
    })
}

impl Serialize for HyperRelation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.base.size();
        let size = self.rows.len();
        let rows = self
            .rows
            .iter()
            .enumerate()
            .map(|(a, row)| {
                let bits = (0..size).map(|b| if row.contains(b) { '1' } else { '0' }).collect();
                (mask_key(n, a as u64), bits)
            })
            .collect();
        HyperRelationJson {
            n,
            labels: self.base.labels().to_vec(),
            rows,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for HyperRelation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = HyperRelationJson::deserialize(d)?;
        let parse = || -> Result<HyperRelation> {
            if j.labels.len() != j.n {
                return Err(Error::Parse("label count does not match n".into()));
            }
            let base = GroundSet::new(j.labels.clone())?;
            guard(j.n)?;
            let size = 1usize << j.n;
            if j.rows.len() != size {
                return Err(Error::Parse(format!("expected {size} rows")));
            }
            let mut rows = vec![Subset::empty(size); size];
            for (key, bits) in &j.rows {
                let a = parse_mask_key(j.n, key)? as usize;
                if bits.len() != size {
                    return Err(Error::Parse(format!("row {key} has wrong length")));
                }
                for (b, c) in bits.chars().enumerate() {
                    match c {
                        '1' => rows[a].insert(b),
                        '0' => {}
                        _ => return Err(Error::Parse(format!("row {key}: bad character"))),
                    }
                }
            }
            Ok(HyperRelation { base, rows })
        };
        parse().map_err(D::Error::custom)
    }
}

/// The Hausdorff quasi-uniformity `𝒰_H` on the `2ⁿ`-point set `P(X)`.
pub fn hausdorff_of(q: &FiniteQuasiUniformity) -> Result<FiniteQuasiUniformity> {
    FiniteQuasiUniformity::from_preorder(hyper_h(q.min_entourage())?.to_relation()?)
}

/// `U_H(A) ⊆ V_H(A)` decided without building the hyperspace:
/// `U(A) ⊆ V(A)` and every `x ∈ A` has some `y ∈ A` with `U(y) ⊆ V(x)`.
pub fn qh_local_criterion(u: &Relation, v: &Relation, a: &Subset) -> Result<bool> {
    same_ground(u.ground(), v.ground())?;
    for r in [u, v] {
        if let Some(x) = r.first_non_reflexive() {
            return Err(Error::NotReflexive(x));
        }
    }
    if !u.image(a).is_subset(&v.image(a)) {
        return Ok(false);
    }
    Ok(a.iter().all(|x| a.iter().any(|y| u.row(y).is_subset(v.row(x)))))
}

/// `q1` is QH-finer than `q2`: `τ(q2_H) ⊆ τ(q1_H)`, i.e. the minimum
/// hyperspace entourages satisfy `(M1)_H ⊆ (M2)_H`.
pub fn qh_finer(q1: &FiniteQuasiUniformity, q2: &FiniteQuasiUniformity) -> Result<bool> {
    same_ground(q1.ground(), q2.ground())?;
    Ok(hyper_h(q1.min_entourage())?.is_subset(&hyper_h(q2.min_entourage())?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `q1` is not QH-finer than `q2`.
    Forward,
    /// `q2` is not QH-finer than `q1`.
    Backward,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QhCounterexample {
    /// Labels of the subset `A` at which the successor sets are not nested.
    pub subset: Vec<String>,
    #[serde(skip)]
    pub mask: u64,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QhVerdict {
    pub finer_forward: bool,
    pub finer_backward: bool,
    pub counterexample: Option<QhCounterexample>,
}

impl QhVerdict {
    pub fn equivalent(&self) -> bool {
        self.finer_forward && self.finer_backward
    }
}

fn first_failure(h1: &HyperRelation, h2: &HyperRelation) -> Option<u64> {
    (0..h1.points() as u64).find(|&a| !h1.successors(a).is_subset(h2.successors(a)))
}

pub fn qh_equivalent(q1: &FiniteQuasiUniformity, q2: &FiniteQuasiUniformity) -> Result<QhVerdict> {
    same_ground(q1.ground(), q2.ground())?;
    let h1 = hyper_h(q1.min_entourage())?;
    let h2 = hyper_h(q2.min_entourage())?;
    let fwd = first_failure(&h1, &h2);
    let bwd = first_failure(&h2, &h1);
    let base = q1.ground();
    let counterexample = fwd
        .map(|m| (m, Direction::Forward))
        .or(bwd.map(|m| (m, Direction::Backward)))
        .map(|(mask, direction)| QhCounterexample {
            subset: Subset::from_mask(base.size(), mask)
                .iter()
                .map(|i| base.label(i).to_string())
                .collect(),
            mask,
            direction,
        });
    Ok(QhVerdict {
        finer_forward: fwd.is_none(),
        finer_backward: bwd.is_none(),
        counterexample,
    })
}

/// All preorders on `n` labeled points.
///
/// Built by adding points one at a time: a new point `p` over a preorder `R`
/// on the earlier points is fixed by its down-set `D` and up-set `U`, which
/// must be a down-set and an up-set of `R` with `D × U ⊆ R`. Output order is
/// deterministic (parent order, then `D`, then `U` by mask).
pub fn enumerate_preorders(n: usize) -> Result<Vec<Relation>> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    if n > MAX_ENUMERATE_POINTS {
        return Err(Error::TooLarge {
            what: "preorder enumeration",
            size: n,
            limit: MAX_ENUMERATE_POINTS,
        });
    }
    // Preorders as row masks over the first k points.
    let mut layer: Vec<Vec<u64>> = vec![vec![1]];
    for k in 1..n {
        let mut next = Vec::new();
        for rows in &layer {
            let below = |m: u64| -> u64 {
                // {x : x <= y for some y in m}
                (0..k).filter(|&x| rows[x] & m != 0).fold(0, |acc, x| acc | 1 << x)
            };
            let above = |m: u64| -> u64 { (0..k).filter(|&x| m >> x & 1 == 1).fold(0, |acc, x| acc | rows[x]) };
            let downs: Vec<u64> = (0..1u64 << k).filter(|&m| below(m) == m).collect();
            let ups: Vec<u64> = (0..1u64 << k).filter(|&m| above(m) == m).collect();
            for &d in &downs {
                for &u in &ups {
                    let compatible = (0..k).filter(|&x| d >> x & 1 == 1).all(|x| u & !rows[x] == 0);
                    if !compatible {
                        continue;
                    }
                    let mut new_rows: Vec<u64> = rows
                        .iter()
                        .enumerate()
                        .map(|(x, &r)| if d >> x & 1 == 1 { r | 1 << k } else { r })
                        .collect();
                    new_rows.push(u | 1 << k);
                    next.push(new_rows);
                }
            }
        }
        layer = next;
    }
    let ground = GroundSet::with_size(n)?;
    Ok(layer
        .into_iter()
        .map(|rows| {
            let rows = rows.into_iter().map(|m| Subset::from_mask(n, m)).collect();
            Relation::from_rows(&ground, rows).expect("sizes match")
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanReport {
    pub n: usize,
    pub preorders: usize,
    pub pairs: usize,
    /// Index pairs `(i, j)`, `i < j`, of distinct QH-equivalent preorders.
    pub collisions: Vec<(usize, usize)>,
}

/// Compares every unordered pair of distinct preorders on `n` points for
/// QH-equivalence. Finite spaces have compact symmetrizations, so the
/// expected collision list is empty.
pub fn qh_singular_scan(n: usize) -> Result<ScanReport> {
    if n > MAX_SCAN_POINTS {
        return Err(Error::TooLarge {
            what: "singularity scan",
            size: n,
            limit: MAX_SCAN_POINTS,
        });
    }
    let preorders = enumerate_preorders(n)?;
    let hypers: Vec<HyperRelation> = preorders
        .par_iter()
        .map(hyper_h)
        .collect::<Result<_>>()?;
    let m = hypers.len();
    let mut collisions: Vec<(usize, usize)> = (0..m)
        .into_par_iter()
        .flat_map_iter(|i| {
            let hypers = &hypers;
            ((i + 1)..m).filter_map(move |j| {
                let equivalent = hypers[i].is_subset(&hypers[j]) && hypers[j].is_subset(&hypers[i]);
                equivalent.then_some((i, j))
            })
        })
        .collect();
    collisions.sort_unstable();
    Ok(ScanReport {
        n,
        preorders: m,
        pairs: m * (m.saturating_sub(1)) / 2,
        collisions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: usize) -> Arc<GroundSet> {
        GroundSet::with_size(n).unwrap()
    }

    fn subset_of(a: u64, b: u64) -> bool {
        a & !b == 0
    }

    #[test]
    fn minus_and_plus_examples() {
        let g3 = g(3);
        let id = Relation::identity(&g3);
        let minus = hyper_minus(&id).unwrap();
        let plus = hyper_plus(&id).unwrap();
        let full = hyper_minus(&Relation::full(&g3)).unwrap();
        for a in 0..8u64 {
            for b in 0..8u64 {
                assert_eq!(minus.contains(a, b), subset_of(a, b));
                assert_eq!(plus.contains(a, b), subset_of(b, a));
                assert_eq!(full.contains(a, b), a == 0 || b != 0);
            }
            assert!(minus.contains(0, a));
            assert!(plus.contains(a, 0));
        }
        let ab = Relation::reflexive_with(&g(2), [(0, 1)]);
        assert!(hyper_plus(&ab).unwrap().contains(0b01, 0b11));
    }

    #[test]
    fn hausdorff_examples() {
        let g2 = g(2);
        let id = hyper_h(&Relation::identity(&g2)).unwrap();
        for a in 0..4u64 {
            for b in 0..4u64 {
                assert_eq!(id.contains(a, b), a == b);
            }
        }
        let full = hyper_h(&Relation::full(&g2)).unwrap();
        assert_eq!(full.successors(0), &Subset::from_mask(4, 0b0001));
        for a in 1..4u64 {
            assert_eq!(full.successors(a), &Subset::from_mask(4, 0b1110));
        }
        // u = {Δ,(a,b)}: U_H({a}) = {{a},{b},{a,b}}.
        let ab = hyper_h(&Relation::reflexive_with(&g2, [(0, 1)])).unwrap();
        assert_eq!(ab.successors(0b01), &Subset::from_indices(4, [1, 2, 3]));
    }

    #[test]
    fn hausdorff_of_examples() {
        let g2 = g(2);
        let hd = hausdorff_of(&FiniteQuasiUniformity::discrete(&g2)).unwrap();
        assert_eq!(hd.min_entourage(), &Relation::identity(hd.ground()));
        assert_eq!(hd.ground().labels(), ["{}", "{a}", "{b}", "{a,b}"]);
        let hi = hausdorff_of(&FiniteQuasiUniformity::indiscrete(&g2)).unwrap();
        assert_eq!(hi.min_entourage().row(0), &Subset::from_mask(4, 1));
        // P(P(X)) at n = 3 has 256 points.
        let q = FiniteQuasiUniformity::from_preorder(Relation::reflexive_with(&g(3), [(0, 1)])).unwrap();
        let twice = hausdorff_of(&hausdorff_of(&q).unwrap()).unwrap();
        assert_eq!(twice.ground().size(), 256);
        assert!(twice.min_entourage().is_preorder());
    }

    #[test]
    fn guard_rejects_large() {
        let big = Relation::identity(&g(17));
        assert!(matches!(hyper_h(&big), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn local_criterion_examples() {
        let g2 = g(2);
        let id = Relation::identity(&g2);
        let ab = Relation::reflexive_with(&g2, [(0, 1)]);
        for m in 0..4u64 {
            let a = Subset::from_mask(2, m);
            assert!(qh_local_criterion(&id, &ab, &a).unwrap());
            assert!(qh_local_criterion(&id, &id, &a).unwrap());
        }
        assert!(qh_local_criterion(&ab, &id, &Subset::empty(2)).unwrap());
        assert!(!qh_local_criterion(&ab, &id, &Subset::from_indices(2, [0])).unwrap());
        assert!(!hyper_h(&ab).unwrap().successors(0b01).is_subset(hyper_h(&id).unwrap().successors(0b01)));
        assert_eq!(
            qh_local_criterion(&id, &Relation::identity(&g(3)), &Subset::empty(2)),
            Err(Error::GroundMismatch)
        );
    }

    #[test]
    fn finer_and_equivalent() {
        let g2 = g(2);
        let d = FiniteQuasiUniformity::discrete(&g2);
        let i = FiniteQuasiUniformity::indiscrete(&g2);
        assert!(qh_finer(&d, &d).unwrap());
        assert!(qh_finer(&d, &i).unwrap());
        assert!(!qh_finer(&i, &d).unwrap());
        assert!(qh_equivalent(&i, &i).unwrap().equivalent());
        let v = qh_equivalent(&d, &i).unwrap();
        assert!(!v.equivalent());
        let ce = v.counterexample.unwrap();
        assert_eq!(ce.direction, Direction::Backward);
        assert!(!hyper_h(i.min_entourage())
            .unwrap()
            .successors(ce.mask)
            .is_subset(hyper_h(d.min_entourage()).unwrap().successors(ce.mask)));
    }

    /// Naive oracle: every reflexive relation filtered by transitivity.
    fn naive_preorders(n: usize) -> Vec<Relation> {
        let g = g(n);
        let off: Vec<(usize, usize)> = (0..n)
            .flat_map(|x| (0..n).filter(move |&y| y != x).map(move |y| (x, y)))
            .collect();
        (0..1u64 << off.len())
            .map(|bits| {
                Relation::reflexive_with(
                    &g,
                    off.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, &p)| p),
                )
            })
            .filter(Relation::is_preorder)
            .collect()
    }

    #[test]
    fn preorder_counts_match_naive_filter() {
        for (n, count) in [(1, 1), (2, 4), (3, 29), (4, 355)] {
            let fast = enumerate_preorders(n).unwrap();
            assert_eq!(fast.len(), count);
            let mut a: Vec<_> = fast.iter().map(Relation::row_strings).collect();
            let mut b: Vec<_> = naive_preorders(n).iter().map(Relation::row_strings).collect();
            a.sort();
            b.sort();
            assert_eq!(a, b);
        }
        assert_eq!(enumerate_preorders(5).unwrap().len(), 6942);
        assert!(enumerate_preorders(0).is_err());
        assert!(enumerate_preorders(6).is_err());
    }

    #[test]
    fn enumeration_is_deterministic() {
        assert_eq!(enumerate_preorders(3).unwrap(), enumerate_preorders(3).unwrap());
    }

    #[test]
    fn scan_small() {
        let r = qh_singular_scan(2).unwrap();
        assert_eq!((r.preorders, r.pairs), (4, 6));
        assert!(r.collisions.is_empty());
        let r = qh_singular_scan(3).unwrap();
        assert_eq!(r.pairs, 406);
        assert!(r.collisions.is_empty());
        assert!(qh_singular_scan(5).is_err());
    }

    #[test]
    fn hyper_json_round_trip() {
        let h = hyper_h(&Relation::reflexive_with(&g(2), [(0, 1)])).unwrap();
        let text = serde_json::to_string(&h).unwrap();
        assert!(text.contains(r#""10":"0111""#));
        let back: HyperRelation = serde_json::from_str(&text).unwrap();
        assert_eq!(back, h);
    }
}

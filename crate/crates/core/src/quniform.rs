//! Finite quasi-uniformities.
//!
//! On a finite set every filter of relations is principal, and a principal
//! filter `{U : U ⊇ M}` is a quasi-uniformity exactly when `M` is a preorder
//! (`M ∘ M ⊆ M` is the only way to satisfy `V² ⊆ U` inside a finite
//! descending family). Every filter-level notion below is therefore evaluated
//! on the minimum entourage `M`:
//!
//! - `τ(𝒰)` is the family of up-sets of `M`, and `M` is its specialization
//!   preorder;
//! - `A` is uniformly isolated iff `M(A) = A`, because `M` is the least
//!   entourage and images are monotone in the relation;
//! - `A ≪ B` iff `M(A) ⊆ B`.

use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::relcore::{all_masks, min_small_cover, same_ground, GroundSet, Relation, Subset};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "QuasiUniformityJson", into = "QuasiUniformityJson")]
pub struct FiniteQuasiUniformity {
    min: Relation,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QuasiUniformityJson {
    min: Relation,
}

impl TryFrom<QuasiUniformityJson> for FiniteQuasiUniformity {
    type Error = Error;

    fn try_from(j: QuasiUniformityJson) -> Result<Self> {
        FiniteQuasiUniformity::from_preorder(j.min)
    }
}

impl From<FiniteQuasiUniformity> for QuasiUniformityJson {
    fn from(q: FiniteQuasiUniformity) -> Self {
        QuasiUniformityJson { min: q.min }
    }
}

impl FiniteQuasiUniformity {
    pub fn from_preorder(min: Relation) -> Result<Self> {
        if let Some(x) = min.first_non_reflexive() {
            return Err(Error::NotReflexive(x));
        }
        if !min.is_transitive() {
            return Err(Error::NotQuasiUniformityBase);
        }
        Ok(FiniteQuasiUniformity { min })
    }

    /// The filter generated by `base`; its minimum is `⋂ base`.
    pub fn from_base(base: &[Relation]) -> Result<Self> {
        let (first, rest) = base
            .split_first()
            .ok_or_else(|| Error::InvalidArgument("empty base".into()))?;
        let mut min = first.clone();
        for r in rest {
            min = min.intersection(r)?;
        }
        for r in base {
            if let Some(x) = r.first_non_reflexive() {
                return Err(Error::NotReflexive(x));
            }
        }
        Self::from_preorder(min)
    }

    pub fn discrete(ground: &Arc<GroundSet>) -> Self {
        FiniteQuasiUniformity {
            min: Relation::identity(ground),
        }
    }

    pub fn indiscrete(ground: &Arc<GroundSet>) -> Self {
        FiniteQuasiUniformity {
            min: Relation::full(ground),
        }
    }

    pub fn ground(&self) -> &Arc<GroundSet> {
        self.min.ground()
    }

    pub fn min_entourage(&self) -> &Relation {
        &self.min
    }

    pub fn into_min_entourage(self) -> Relation {
        self.min
    }

    /// Whether `u` belongs to the filter.
    pub fn is_entourage(&self, u: &Relation) -> bool {
        self.min.is_subset(u)
    }

    pub fn conjugate(&self) -> Self {
        FiniteQuasiUniformity {
            min: self.min.inverse(),
        }
    }

    pub fn symmetrize(&self) -> Self {
        FiniteQuasiUniformity {
            min: self.min.symmetric_part(),
        }
    }

    pub fn is_uniformity(&self) -> bool {
        self.min.is_symmetric()
    }

    pub fn topology(&self) -> FiniteTopology {
        FiniteTopology {
            specialization: self.min.clone(),
        }
    }

    /// `(true, None)` when the only uniformly isolated sets are `∅` and `X`,
    /// otherwise `(false, Some(A))` with `∅ ⊊ A ⊊ X` and `M(A) = A`.
    pub fn is_uniformly_connected(&self) -> (bool, Option<Subset>) {
        // Each M(x) is an up-set; if all of them are X, so is every nonempty up-set.
        let witness = self.min.rows().iter().find(|row| !row.is_full()).cloned();
        (witness.is_none(), witness)
    }

    /// `A ≪ B`.
    pub fn ll(&self, a: &Subset, b: &Subset) -> bool {
        self.min.image(a).is_subset(b)
    }

    /// Finite analogue of `b(X, 𝒰)`: one more than the number of
    /// `M`-small pieces needed to cover `X`.
    pub fn boundedness_number(&self) -> Result<usize> {
        Ok(1 + min_small_cover(&self.min)?.count)
    }
}

/// `τ(𝒰)` stored through its specialization preorder.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteTopology {
    specialization: Relation,
}

pub const MAX_MATERIALIZED_OPENS: usize = 4;
pub const MAX_DOT_POINTS: usize = 8;

impl FiniteTopology {
    pub fn from_specialization(p: Relation) -> Result<Self> {
        if !p.is_preorder() {
            return Err(Error::InvalidArgument(
                "specialization relation must be a preorder".into(),
            ));
        }
        Ok(FiniteTopology { specialization: p })
    }

    pub fn ground(&self) -> &Arc<GroundSet> {
        self.specialization.ground()
    }

    pub fn specialization(&self) -> &Relation {
        &self.specialization
    }

    pub fn is_open(&self, a: &Subset) -> bool {
        self.specialization.image(a).is_subset(a)
    }

    /// Open sets as masks in increasing order. Only for `n <= 4`.
    pub fn opens(&self) -> Result<Vec<u64>> {
        let n = self.ground().size();
        if n > MAX_MATERIALIZED_OPENS {
            return Err(Error::TooLarge {
                what: "materialized topology",
                size: n,
                limit: MAX_MATERIALIZED_OPENS,
            });
        }
        Ok(all_masks(n)
            .filter(|&m| self.is_open(&Subset::from_mask(n, m)))
            .collect())
    }

    /// `τ1 ⊆ τ2`, i.e. `τ2` is finer.
    pub fn is_coarser_than(&self, finer: &FiniteTopology) -> bool {
        finer.specialization.is_subset(&self.specialization)
    }

    /// Coarsest topology finer than both.
    pub fn join(&self, other: &FiniteTopology) -> Result<FiniteTopology> {
        same_ground(self.ground(), other.ground())?;
        Ok(FiniteTopology {
            specialization: self.specialization.intersection(&other.specialization)?,
        })
    }

    /// DOT digraph of the specialization preorder, transitively reduced.
    ///
    /// Points that are equivalent under the preorder are drawn as one
    /// `cluster` subgraph; edges join the first member of each class and
    /// follow the covering relation of the quotient order, `x -> y` meaning
    /// every open set containing `x` contains `y`.
    pub fn to_dot(&self, name: &str) -> Result<String> {
        let n = self.ground().size();
        if n > MAX_DOT_POINTS {
            return Err(Error::TooLarge {
                what: "DOT export",
                size: n,
                limit: MAX_DOT_POINTS,
            });
        }
        let p = &self.specialization;
        let g = self.ground();
        let le = |x: usize, y: usize| p.contains(x, y);

        // Class representative = smallest equivalent index.
        let rep: Vec<usize> = (0..n)
            .map(|x| (0..n).find(|&y| le(x, y) && le(y, x)).expect("reflexive"))
            .collect();
        let reps: Vec<usize> = (0..n).filter(|&x| rep[x] == x).collect();

        let mut out = String::new();
        writeln!(out, "digraph \"{name}\" {{").unwrap();
        let mut cluster = 0;
        for &r in &reps {
            let members: Vec<usize> = (0..n).filter(|&x| rep[x] == r).collect();
            if members.len() == 1 {
                writeln!(out, "  \"{}\";", g.label(r)).unwrap();
            } else {
                writeln!(out, "  subgraph cluster_{cluster} {{").unwrap();
                for m in members {
                    writeln!(out, "    \"{}\";", g.label(m)).unwrap();
                }
                writeln!(out, "  }}").unwrap();
                cluster += 1;
            }
        }
        let strictly_below = |a: usize, b: usize| a != b && le(a, b);
        for &a in &reps {
            for &b in &reps {
                if !strictly_below(a, b) {
                    continue;
                }
                let covered = reps
                    .iter()
                    .any(|&c| strictly_below(a, c) && strictly_below(c, b));
                if !covered {
                    writeln!(out, "  \"{}\" -> \"{}\";", g.label(a), g.label(b)).unwrap();
                }
            }
        }
        out.push_str("}\n");
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: usize) -> Arc<GroundSet> {
        GroundSet::with_size(n).unwrap()
    }

    #[test]
    fn from_base_examples() {
        let g2 = g(2);
        let d = FiniteQuasiUniformity::from_base(&[Relation::identity(&g2)]).unwrap();
        assert_eq!(d.min_entourage(), &Relation::identity(&g2));
        let full = Relation::full(&g2);
        let q = FiniteQuasiUniformity::from_base(&[full.clone(), full.clone()]).unwrap();
        assert_eq!(q.min_entourage(), &full);
        let ab = Relation::reflexive_with(&g2, [(0, 1)]);
        let both = Relation::reflexive_with(&g2, [(0, 1), (1, 0)]);
        let q = FiniteQuasiUniformity::from_base(&[ab.clone(), both]).unwrap();
        assert_eq!(q.min_entourage(), &ab);
    }

    #[test]
    fn from_base_rejects_non_transitive() {
        let g3 = g(3);
        let chain = Relation::reflexive_with(&g3, [(0, 1), (1, 2)]);
        assert_eq!(
            FiniteQuasiUniformity::from_base(&[chain]),
            Err(Error::NotQuasiUniformityBase)
        );
        assert!(FiniteQuasiUniformity::from_base(&[]).is_err());
        assert!(matches!(
            FiniteQuasiUniformity::from_base(&[Relation::empty(&g3)]),
            Err(Error::NotReflexive(0))
        ));
    }

    #[test]
    fn conjugate_and_symmetrize() {
        let g2 = g(2);
        let q = FiniteQuasiUniformity::from_preorder(Relation::reflexive_with(&g2, [(0, 1)])).unwrap();
        assert_eq!(
            q.conjugate().min_entourage(),
            &Relation::reflexive_with(&g2, [(1, 0)])
        );
        assert_eq!(q.symmetrize().min_entourage(), &Relation::identity(&g2));
        assert!(q.symmetrize().is_uniformity());
        let full = FiniteQuasiUniformity::indiscrete(&g2);
        assert_eq!(full.symmetrize(), full);
        let d = FiniteQuasiUniformity::discrete(&g2);
        assert_eq!(d.conjugate(), d);
    }

    #[test]
    fn topology_examples() {
        let g2 = g(2);
        assert_eq!(FiniteQuasiUniformity::discrete(&g2).topology().opens().unwrap().len(), 4);
        assert_eq!(
            FiniteQuasiUniformity::indiscrete(&g2).topology().opens().unwrap(),
            vec![0b00, 0b11]
        );
        let q = FiniteQuasiUniformity::from_preorder(Relation::reflexive_with(&g2, [(0, 1)])).unwrap();
        assert_eq!(q.topology().opens().unwrap(), vec![0b00, 0b10, 0b11]);
        assert!(FiniteQuasiUniformity::discrete(&g(5)).topology().opens().is_err());
    }

    #[test]
    fn join_examples() {
        let g2 = g(2);
        let up = FiniteQuasiUniformity::from_preorder(Relation::reflexive_with(&g2, [(0, 1)])).unwrap();
        let t = up.topology();
        assert_eq!(t.join(&t).unwrap(), t);
        let discrete = FiniteQuasiUniformity::discrete(&g2).topology();
        assert_eq!(discrete.join(&t).unwrap(), discrete);
        assert_eq!(t.join(&up.conjugate().topology()).unwrap(), discrete);
        assert!(t.join(&FiniteQuasiUniformity::discrete(&g(3)).topology()).is_err());
    }

    #[test]
    fn connectivity_examples() {
        let g2 = g(2);
        assert_eq!(FiniteQuasiUniformity::indiscrete(&g2).is_uniformly_connected(), (true, None));
        let (ok, w) = FiniteQuasiUniformity::discrete(&g(3)).is_uniformly_connected();
        assert!(!ok);
        assert_eq!(w.unwrap().count(), 1);
        let q = FiniteQuasiUniformity::from_preorder(Relation::reflexive_with(&g2, [(0, 1)])).unwrap();
        assert_eq!(q.is_uniformly_connected(), (false, Some(Subset::from_indices(2, [1]))));
    }

    #[test]
    fn ll_examples() {
        let g3 = g(3);
        let q = FiniteQuasiUniformity::from_preorder(Relation::reflexive_with(&g3, [(0, 1)])).unwrap();
        let s = |v: &[usize]| Subset::from_indices(3, v.iter().copied());
        assert!(q.ll(&s(&[]), &s(&[])));
        assert!(q.ll(&s(&[0, 2]), &s(&[0, 1, 2])));
        assert!(q.ll(&s(&[0]), &s(&[0, 1])));
        assert!(!q.ll(&s(&[0]), &s(&[0])));
    }

    #[test]
    fn boundedness_examples() {
        let g3 = g(3);
        assert_eq!(FiniteQuasiUniformity::indiscrete(&g3).boundedness_number().unwrap(), 2);
        assert_eq!(FiniteQuasiUniformity::discrete(&g3).boundedness_number().unwrap(), 4);
        let q = FiniteQuasiUniformity::from_preorder(Relation::reflexive_with(&g3, [(0, 1), (1, 0)]))
            .unwrap();
        assert_eq!(q.boundedness_number().unwrap(), 3);
    }

    #[test]
    fn json_round_trip_and_validation() {
        let q = FiniteQuasiUniformity::from_preorder(Relation::reflexive_with(&g(2), [(0, 1)])).unwrap();
        let text = serde_json::to_string(&q).unwrap();
        assert_eq!(text, r#"{"min":{"n":2,"labels":["a","b"],"rows":["11","01"]}}"#);
        assert_eq!(serde_json::from_str::<FiniteQuasiUniformity>(&text).unwrap(), q);
        let bad = r#"{"min":{"n":3,"labels":["a","b","c"],"rows":["110","011","001"]}}"#;
        assert!(serde_json::from_str::<FiniteQuasiUniformity>(bad).is_err());
    }

    #[test]
    fn dot_export() {
        let g2 = g(2);
        let d = FiniteQuasiUniformity::discrete(&g2).topology().to_dot("t").unwrap();
        assert_eq!(d, "digraph \"t\" {\n  \"a\";\n  \"b\";\n}\n");
        let q = FiniteQuasiUniformity::from_preorder(Relation::reflexive_with(&g2, [(0, 1)])).unwrap();
        assert!(q.topology().to_dot("t").unwrap().contains("\"a\" -> \"b\";"));
        let full = FiniteQuasiUniformity::indiscrete(&g(3)).topology().to_dot("t").unwrap();
        assert!(full.contains("subgraph cluster_0"));
        assert!(!full.contains("->"));
        // chain a <= b <= c reduces to two edges.
        let chain = Relation::reflexive_with(&g(3), [(0, 1), (1, 2), (0, 2)]);
        let dot = FiniteQuasiUniformity::from_preorder(chain).unwrap().topology().to_dot("t").unwrap();
        assert_eq!(dot.matches("->").count(), 2);
        assert!(FiniteQuasiUniformity::discrete(&g(9)).topology().to_dot("t").is_err());
    }
}

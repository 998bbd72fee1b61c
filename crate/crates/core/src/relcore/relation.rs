use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ground::{same_ground, GroundSet};
use super::subset::Subset;
use crate::error::{Error, Result};

/// A binary relation on a finite ground set, stored as one bit row per point:
/// row `x` is the image `R(x) = {y : (x, y) in R}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    ground: Arc<GroundSet>,
    rows: Vec<Subset>,
}

impl Relation {
    pub fn empty(ground: &Arc<GroundSet>) -> Self {
        let n = ground.size();
        Relation {
            ground: ground.clone(),
            rows: vec![Subset::empty(n); n],
        }
    }

    /// The diagonal `Δ`.
    pub fn identity(ground: &Arc<GroundSet>) -> Self {
        let n = ground.size();
        Relation {
            ground: ground.clone(),
            rows: (0..n).map(|i| Subset::singleton(n, i)).collect(),
        }
    }

    /// `X × X`.
    pub fn full(ground: &Arc<GroundSet>) -> Self {
        let n = ground.size();
        Relation {
            ground: ground.clone(),
            rows: vec![Subset::full(n); n],
        }
    }

    pub fn from_pairs(ground: &Arc<GroundSet>, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut r = Self::empty(ground);
        for (x, y) in pairs {
            r.insert(x, y);
        }
        r
    }

    /// `Δ` together with the given pairs.
    pub fn reflexive_with(
        ground: &Arc<GroundSet>,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Self {
        let mut r = Self::identity(ground);
        for (x, y) in pairs {
            r.insert(x, y);
        }
        r
    }

    pub fn from_rows(ground: &Arc<GroundSet>, rows: Vec<Subset>) -> Result<Self> {
        let n = ground.size();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument(format!(
                "relation rows do not match a ground set of size {n}"
            )));
        }
        Ok(Relation {
            ground: ground.clone(),
            rows,
        })
    }

    /// Relation on `n <= 8` points from a row-major bit pattern (`bits[x*n + y]`).
    pub fn from_bits(ground: &Arc<GroundSet>, bits: u64) -> Self {
        let n = ground.size();
        assert!(n * n <= 64);
        let mut r = Self::empty(ground);
        for x in 0..n {
            for y in 0..n {
                if bits >> (x * n + y) & 1 == 1 {
                    r.insert(x, y);
                }
            }
        }
        r
    }

    pub fn ground(&self) -> &Arc<GroundSet> {
        &self.ground
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, x: usize) -> &Subset {
        &self.rows[x]
    }

    pub fn rows(&self) -> &[Subset] {
        &self.rows
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.rows[x].contains(y)
    }

    pub fn insert(&mut self, x: usize, y: usize) {
        self.rows[x].insert(y);
    }

    pub fn remove(&mut self, x: usize, y: usize) {
        self.rows[x].remove(y);
    }

    pub fn pair_count(&self) -> usize {
        self.rows.iter().map(Subset::count).sum()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(x, row)| row.iter().map(move |y| (x, y)))
    }

    /// `r` then `s`: `(x, z)` is in the result iff some `y` has `(x, y) ∈ r`
    /// and `(y, z) ∈ s`. In the usual right-to-left notation this is `s ∘ r`.
    pub fn compose(&self, s: &Relation) -> Result<Relation> {
        same_ground(&self.ground, &s.ground)?;
        let rows = self.rows.iter().map(|row| s.image(row)).collect();
        Ok(Relation {
            ground: self.ground.clone(),
            rows,
        })
    }

    /// `self ∘ self ∘ .. ` (`k >= 1` factors).
    pub fn power(&self, k: usize) -> Relation {
        assert!(k >= 1);
        let mut acc = self.clone();
        for _ in 1..k {
            acc = acc.compose(self).expect("same ground");
        }
        acc
    }

    pub fn inverse(&self) -> Relation {
        let mut r = Relation::empty(&self.ground);
        for (x, y) in self.pairs() {
            r.insert(y, x);
        }
        r
    }

    /// `R(A) = ⋃_{x ∈ A} R(x)`.
    pub fn image(&self, a: &Subset) -> Subset {
        let mut out = Subset::empty(self.size());
        for x in a.iter() {
            out.union_with(&self.rows[x]);
        }
        out
    }

    pub fn image_of_point(&self, x: usize) -> &Subset {
        &self.rows[x]
    }

    pub fn intersection(&self, other: &Relation) -> Result<Relation> {
        same_ground(&self.ground, &other.ground)?;
        Ok(Relation {
            ground: self.ground.clone(),
            rows: self
                .rows
                .iter()
                .zip(&other.rows)
                .map(|(a, b)| a.intersection(b))
                .collect(),
        })
    }

    pub fn union(&self, other: &Relation) -> Result<Relation> {
        same_ground(&self.ground, &other.ground)?;
        Ok(Relation {
            ground: self.ground.clone(),
            rows: self
                .rows
                .iter()
                .zip(&other.rows)
                .map(|(a, b)| a.union(b))
                .collect(),
        })
    }

    /// `R ∩ R⁻¹`.
    pub fn symmetric_part(&self) -> Relation {
        self.intersection(&self.inverse()).expect("same ground")
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.rows.len() == other.rows.len()
            && self.rows.iter().zip(&other.rows).all(|(a, b)| a.is_subset(b))
    }

    pub fn first_non_reflexive(&self) -> Option<usize> {
        (0..self.size()).find(|&x| !self.contains(x, x))
    }

    pub fn is_reflexive(&self) -> bool {
        self.first_non_reflexive().is_none()
    }

    pub fn is_symmetric(&self) -> bool {
        self.pairs().all(|(x, y)| self.contains(y, x))
    }

    pub fn is_transitive(&self) -> bool {
        self.rows
            .iter()
            .all(|row| self.image(row).is_subset(row))
    }

    /// Reflexive and `R ∘ R ⊆ R`.
    pub fn is_preorder(&self) -> bool {
        self.is_reflexive() && self.is_transitive()
    }

    pub fn reflexive_transitive_closure(&self) -> Relation {
        let n = self.size();
        let mut rows = self.rows.clone();
        for (x, row) in rows.iter_mut().enumerate() {
            row.insert(x);
        }
        // Warshall over bit rows.
        for k in 0..n {
            let rk = rows[k].clone();
            for row in rows.iter_mut() {
                if row.contains(k) {
                    row.union_with(&rk);
                }
            }
        }
        Relation {
            ground: self.ground.clone(),
            rows,
        }
    }

    /// Rows as `0/1` strings in label order.
    pub fn row_strings(&self) -> Vec<String> {
        let n = self.size();
        self.rows
            .iter()
            .map(|row| (0..n).map(|y| if row.contains(y) { '1' } else { '0' }).collect())
            .collect()
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = &self.ground;
        f.debug_set()
            .entries(
                self.pairs()
                    .map(|(x, y)| format!("({},{})", g.label(x), g.label(y))),
            )
            .finish()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RelationJson {
    n: usize,
    labels: Vec<String>,
    rows: Vec<String>,
}

impl Relation {
    fn to_json_repr(&self) -> RelationJson {
        RelationJson {
            n: self.size(),
            labels: self.ground.labels().to_vec(),
            rows: self.row_strings(),
        }
    }

    fn from_json_repr(j: RelationJson) -> Result<Relation> {
        if j.labels.len() != j.n {
            return Err(Error::Parse(format!(
                "relation has n = {} but {} labels",
                j.n,
                j.labels.len()
            )));
        }
        let ground = GroundSet::new(j.labels)?;
        Self::parse_rows(&ground, &j.rows)
    }

    pub(crate) fn parse_rows(ground: &Arc<GroundSet>, rows: &[String]) -> Result<Relation> {
        let n = ground.size();
        if rows.len() != n {
            return Err(Error::Parse(format!("expected {n} rows, found {}", rows.len())));
        }
        let mut r = Relation::empty(ground);
        for (x, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Parse(format!("row {x} has length {}, expected {n}", row.len())));
            }
            for (y, c) in row.chars().enumerate() {
                match c {
                    '1' => r.insert(x, y),
                    '0' => {}
                    other => {
                        return Err(Error::Parse(format!("row {x}: unexpected character {other:?}")))
                    }
                }
            }
        }
        Ok(r)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self.to_json_repr()).expect("serializable")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Relation> {
        let j: RelationJson =
            serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json_repr(j)
    }
}

impl Serialize for Relation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json_repr().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Relation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = RelationJson::deserialize(d)?;
        Relation::from_json_repr(j).map_err(serde::de::Error::custom)
    }
}

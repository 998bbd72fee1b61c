use std::sync::Arc;

use super::ground::{same_ground, GroundSet};
use super::relation::Relation;
use crate::error::{Error, Result};

/// Reflexive relations `L0, L1, ..` with `L(k+1) ∘ L(k+1) ⊆ L(k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalSequence {
    ground: Arc<GroundSet>,
    levels: Vec<Relation>,
}

impl NormalSequence {
    pub fn new(levels: Vec<Relation>) -> Result<Self> {
        let first = levels
            .first()
            .ok_or_else(|| Error::NotNormalSequence("no levels".into()))?;
        let ground = first.ground().clone();
        for (k, level) in levels.iter().enumerate() {
            same_ground(&ground, level.ground())?;
            if let Some(x) = level.first_non_reflexive() {
                return Err(Error::NotNormalSequence(format!(
                    "level {k} is not reflexive at point {}",
                    ground.label(x)
                )));
            }
        }
        for k in 0..levels.len() - 1 {
            let sq = levels[k + 1].compose(&levels[k + 1])?;
            if !sq.is_subset(&levels[k]) {
                return Err(Error::NotNormalSequence(format!(
                    "level {} squared is not contained in level {k}",
                    k + 1
                )));
            }
        }
        Ok(NormalSequence { ground, levels })
    }

    pub fn ground(&self) -> &Arc<GroundSet> {
        &self.ground
    }

    pub fn levels(&self) -> &[Relation] {
        &self.levels
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relcore::Subset;

    #[test]
    fn validates_square_condition() {
        let g = GroundSet::with_size(3).unwrap();
        let chain = Relation::reflexive_with(&g, [(0, 1), (1, 2)]);
        let full = Relation::full(&g);
        assert!(NormalSequence::new(vec![full.clone(), chain.clone()]).is_ok());
        // chain² contains (a,c), which chain does not.
        assert!(NormalSequence::new(vec![chain.clone(), chain]).is_err());
        assert!(NormalSequence::new(vec![]).is_err());
        assert!(NormalSequence::new(vec![Relation::empty(&g)]).is_err());
    }

    #[test]
    fn nested_images_shrink() {
        let g = GroundSet::with_size(3).unwrap();
        let seq = NormalSequence::new(vec![
            Relation::full(&g),
            Relation::reflexive_with(&g, [(0, 1), (1, 2)]),
            Relation::reflexive_with(&g, [(0, 1)]),
            Relation::identity(&g),
        ])
        .unwrap();
        for mask in 0..8u64 {
            let a = Subset::from_mask(3, mask);
            for k in 0..seq.depth() - 1 {
                let next = &seq.levels()[k + 1];
                let twice = next.image(&next.image(&a));
                assert!(twice.is_subset(&seq.levels()[k].image(&a)));
            }
        }
    }
}

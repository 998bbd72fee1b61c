//! Minimum covers by `U`-small sets (`A × A ⊆ U`).
//!
//! A set is small exactly when it is a clique of the symmetric part of `U`,
//! so the minimum cover is a minimum clique cover, found by branch and bound
//! over the maximal cliques.

use super::relation::Relation;
use super::subset::Subset;
use crate::error::{Error, Result};

pub const MAX_SMALL_COVER_POINTS: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmallCover {
    pub count: usize,
    /// Pairwise disjoint small parts covering the ground set.
    pub parts: Vec<Subset>,
}

pub fn is_small(u: &Relation, a: &Subset) -> bool {
    a.iter().all(|x| a.is_subset(u.row(x)))
}

pub fn min_small_cover(u: &Relation) -> Result<SmallCover> {
    let n = u.size();
    if n > MAX_SMALL_COVER_POINTS {
        return Err(Error::TooLarge {
            what: "small-cover ground set",
            size: n,
            limit: MAX_SMALL_COVER_POINTS,
        });
    }
    if let Some(x) = u.first_non_reflexive() {
        return Err(Error::NotReflexive(x));
    }
    let sym = u.symmetric_part();
    let adj: Vec<u64> = (0..n)
        .map(|x| sym.row(x).to_mask().expect("n <= 12") & !(1 << x))
        .collect();

    let mut cliques = Vec::new();
    bron_kerbosch(&adj, 0, (1u64 << n) - 1, 0, &mut cliques);
    cliques.sort_by(|a: &u64, b| b.count_ones().cmp(&a.count_ones()).then(a.cmp(b)));

    let mut best: Vec<u64> = (0..n).map(|x| 1u64 << x).collect();
    let mut chosen = Vec::new();
    branch(&cliques, (1u64 << n) - 1, &mut chosen, &mut best);

    // Make the chosen cliques disjoint; subsets of small sets stay small.
    let mut taken = 0u64;
    let mut parts = Vec::with_capacity(best.len());
    for c in best {
        let part = c & !taken;
        taken |= c;
        if part != 0 {
            parts.push(Subset::from_mask(n, part));
        }
    }
    Ok(SmallCover {
        count: parts.len(),
        parts,
    })
}

fn bron_kerbosch(adj: &[u64], r: u64, mut p: u64, mut x: u64, out: &mut Vec<u64>) {
    if p == 0 {
        if x == 0 {
            out.push(r);
        }
        return;
    }
    let pivot = (p | x).trailing_zeros() as usize;
    let mut candidates = p & !adj[pivot];
    while candidates != 0 {
        let v = candidates.trailing_zeros() as usize;
        candidates &= candidates - 1;
        bron_kerbosch(adj, r | 1 << v, p & adj[v], x & adj[v], out);
        p &= !(1 << v);
        x |= 1 << v;
    }
}

fn branch(cliques: &[u64], uncovered: u64, chosen: &mut Vec<u64>, best: &mut Vec<u64>) {
    if uncovered == 0 {
        if chosen.len() < best.len() {
            *best = chosen.clone();
        }
        return;
    }
    // Lower bound: every further clique covers at most `largest` new points.
    let largest = cliques
        .iter()
        .map(|c| (c & uncovered).count_ones())
        .max()
        .unwrap_or(1)
        .max(1);
    let needed = uncovered.count_ones().div_ceil(largest) as usize;
    if chosen.len() + needed >= best.len() {
        return;
    }
    let v = uncovered.trailing_zeros();
    for &c in cliques.iter().filter(|&&c| c >> v & 1 == 1) {
        chosen.push(c);
        branch(cliques, uncovered & !c, chosen, best);
        chosen.pop();
    }
}

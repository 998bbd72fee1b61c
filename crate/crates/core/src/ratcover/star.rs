use rayon::prelude::*;
use serde::Serialize;

use super::check::{all_hold, Check};
use super::cover::OmegaCover;
use super::interval::{Interval, RationalIntervalSet};
use super::oracle::MetricOracle;
use super::CoverError;
use crate::rational::{self, Rational};

pub const DEFAULT_GRID: usize = 1 << 10;

/// Denominator of the endpoints in the connectivity family.
const FAMILY_DENOMINATOR: i64 = 8;

/// Evidence that no proper nonempty interval set of the generated family is
/// uniformly isolated: every member escapes its own `U_ε` image at the
/// smallest scale, hence at every larger scale too.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConnectivityCertificate {
    pub oracle: MetricOracle,
    #[serde(with = "rational::serde_str")]
    pub scale: Rational,
    pub family_size: usize,
    pub checks: Vec<Check>,
}

/// Proper nonempty unions of at most two intervals with endpoints in
/// `{k/8}` and every choice of open or closed ends.
fn connectivity_family() -> Vec<RationalIntervalSet> {
    let d = FAMILY_DENOMINATOR;
    let ends: Vec<Rational> = (0..=d).map(|k| Rational::new(k.into(), d.into())).collect();
    let flags = [(false, false), (false, true), (true, false), (true, true)];
    let mut singles = Vec::new();
    for (i, lo) in ends.iter().enumerate() {
        for hi in &ends[i..] {
            for &(lo_open, hi_open) in &flags {
                singles.push(Interval::new(lo.clone(), hi.clone(), lo_open, hi_open));
            }
        }
    }
    let mut family: Vec<RationalIntervalSet> = Vec::new();
    for (i, a) in singles.iter().enumerate() {
        family.push(RationalIntervalSet::from_intervals(vec![a.clone()]));
        for b in &singles[i + 1..] {
            if a.hi <= b.lo {
                family.push(RationalIntervalSet::from_intervals(vec![a.clone(), b.clone()]));
            }
        }
    }
    family.retain(|s| !s.is_empty() && !s.is_ground());
    family.sort();
    family.dedup();
    family
}

/// Checks `U_ε(A) ⊄ A` for every member `A` of the generated family.
pub fn connectivity_certificate(oracle: MetricOracle, eps: &Rational) -> Result<ConnectivityCertificate, CoverError> {
    if !rational::is_positive(eps) {
        return Err(CoverError::InvalidArgument("scale must be positive".into()));
    }
    let family = connectivity_family();
    let fixed = family
        .par_iter()
        .find_first(|a| oracle.image(eps, a).is_subset(a));
    if let Some(a) = fixed {
        return Err(CoverError::NotUniformlyConnected {
            set: a.to_string(),
            scale: rational::format(eps),
        });
    }
    Ok(ConnectivityCertificate {
        oracle,
        scale: eps.clone(),
        family_size: family.len(),
        checks: vec![Check::exact("every family member escapes its image", true)
            .with_detail(format!("{} interval sets, all scales >= {}", family.len(), rational::format(eps)))],
    })
}

fn star_cover_certified(c: &OmegaCover) -> Result<(OmegaCover, ConnectivityCertificate), CoverError> {
    let oracle = c.oracle();
    let smallest = c.scales().last().expect("covers are nonempty");
    let connectivity = connectivity_certificate(oracle, smallest)?;
    let d = c.depth();
    let mut sets = Vec::with_capacity(2 * d + 1);
    let mut scales = Vec::with_capacity(2 * d + 1);
    for n in 0..d {
        let half = c.scale_at(n, 1);
        let img = oracle.image(&half, c.set(n));
        if img.is_subset(c.set(n)) {
            return Err(CoverError::UniformlyIsolated { index: n });
        }
        if !img.is_subset(c.set(n + 1)) || &img == c.set(n + 1) {
            return Err(CoverError::ImageCollides { index: n });
        }
        sets.push(c.set(n).clone());
        sets.push(img);
        scales.push(half.clone());
        scales.push(half);
    }
    sets.push(c.set(d).clone());
    scales.push(c.scale_at(d, 1));
    let star = OmegaCover::new(oracle, sets, scales, c.limit_points().to_vec())?;
    Ok((star, connectivity))
}

/// Interleaves each `sets(n)` with its half-scale image, giving a cover `𝒢*`
/// with `(U_{𝒢*})² ⊆ U_𝒢` and materialized depth `2·depth`.
pub fn star_cover(c: &OmegaCover) -> Result<OmegaCover, CoverError> {
    star_cover_certified(c).map(|(s, _)| s)
}

/// Evidence for `(U_{star})² ⊆ U_{base}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SquareCertificate {
    pub base_depth: usize,
    pub star_depth: usize,
    /// Pieces `layer*(m) ∩ layer(k)` on which the containment
    /// `sets*(m+2) ⊆ sets(k+1)` was checked exactly.
    pub pieces_checked: usize,
    /// Points where both sides are materialized.
    pub region: RationalIntervalSet,
    pub grid_points: usize,
    #[serde(with = "rational::serde_vec")]
    pub grid_violations: Vec<Rational>,
    pub checks: Vec<Check>,
}

impl SquareCertificate {
    pub fn passed(&self) -> bool {
        all_hold(&self.checks)
    }
}

/// Certifies `(U_{star})² ⊆ U_{base}` exactly layer by layer and at `grid`
/// sample points. For `x` with star index `m` the left side is
/// `sets*(m+2)`, for base index `k` the right side is `sets(k+1)`.
pub fn square_certificate(base: &OmegaCover, star: &OmegaCover, grid: usize) -> Result<SquareCertificate, CoverError> {
    if base.oracle() != star.oracle() {
        return Err(CoverError::InvalidArgument("covers use different oracles".into()));
    }
    if star.depth() < 2 || base.depth() < 1 {
        return Err(CoverError::InvalidArgument("covers are too shallow to compare".into()));
    }
    let mut pieces = 0;
    let mut layer_failures = Vec::new();
    for m in 0..=star.depth() - 2 {
        let layer = star.layer(m);
        let Some(first) = base.smallest_intersecting(&layer) else {
            continue;
        };
        let last = base.smallest_containing(&layer).unwrap_or(base.depth());
        for k in first..=last.min(base.depth() - 1) {
            if layer.intersects(&base.layer(k)) {
                pieces += 1;
                if !star.set(m + 2).is_subset(base.set(k + 1)) {
                    layer_failures.push(format!("star layer {m}, base layer {k}"));
                }
            }
        }
    }

    let region = star.set(star.depth() - 2).intersection(base.set(base.depth() - 1));
    let points = region.grid(grid);
    let outcomes: Vec<Result<Option<Rational>, CoverError>> = points
        .par_iter()
        .map(|x| {
            let once = star.successor_of_point(x)?;
            let twice = star.successor_of_set(once)?;
            let target = base.successor_of_point(x)?;
            Ok((!twice.is_subset(target)).then(|| x.clone()))
        })
        .collect();
    let mut grid_violations = Vec::new();
    for o in outcomes {
        grid_violations.extend(o?);
    }

    let mut layer_check = Check::exact("squared relation inside base relation on every layer", layer_failures.is_empty());
    if let Some(first) = layer_failures.first() {
        layer_check = layer_check.with_detail(first.clone());
    }
    let grid_check = Check::sampled("squared relation inside base relation on the grid", grid_violations.is_empty())
        .with_detail(format!("{} points", points.len()));
    Ok(SquareCertificate {
        base_depth: base.depth(),
        star_depth: star.depth(),
        pieces_checked: pieces,
        region,
        grid_points: points.len(),
        grid_violations,
        checks: vec![layer_check, grid_check],
    })
}

/// Iterated star covers `𝒢_0 = 𝒢`, `𝒢_{j+1} = 𝒢_j*`: `k + 1` covers with
/// `(U_{𝒢_{j+1}})² ⊆ U_{𝒢_j}` certified for each consecutive pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverNormalSequence {
    #[serde(skip)]
    pub covers: Vec<OmegaCover>,
    pub depths: Vec<usize>,
    pub connectivity: Vec<ConnectivityCertificate>,
    pub squares: Vec<SquareCertificate>,
}

impl CoverNormalSequence {
    pub fn passed(&self) -> bool {
        self.squares.iter().all(SquareCertificate::passed)
            && self.connectivity.iter().all(|c| all_hold(&c.checks))
    }
}

pub fn cover_normal_sequence(c: &OmegaCover, k: usize, grid: usize) -> Result<CoverNormalSequence, CoverError> {
    let mut covers = vec![c.clone()];
    let mut connectivity = Vec::with_capacity(k);
    let mut squares = Vec::with_capacity(k);
    for _ in 0..k {
        let base = covers.last().unwrap();
        let (star, conn) = star_cover_certified(base)?;
        squares.push(square_certificate(base, &star, grid)?);
        connectivity.push(conn);
        covers.push(star);
    }
    Ok(CoverNormalSequence {
        depths: covers.iter().map(OmegaCover::depth).collect(),
        covers,
        connectivity,
        squares,
    })
}

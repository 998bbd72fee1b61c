//! Exact relation algebra on finite labeled ground sets.
//!
//! Composition is read left to right: `r.compose(&s)` is "first `r`, then
//! `s`", which is `s ∘ r` in the right-to-left notation `V ∘ U`.
//! Relations are bit rows; subsets are bit masks.

mod ground;
mod normal;
mod relation;
mod small_cover;
mod subset;

pub use ground::GroundSet;
pub(crate) use ground::same_ground;
pub use normal::NormalSequence;
pub use relation::Relation;
pub use small_cover::{is_small, min_small_cover, SmallCover, MAX_SMALL_COVER_POINTS};
pub use subset::{all_masks, Subset};

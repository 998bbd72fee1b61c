//! Exact computations on quasi-uniform spaces.
//!
//! Finite quasi-uniformities, their topologies and hyperspace
//! quasi-uniformities, Kelley quasi-pseudometrics of normal sequences, and
//! certified cover constructions on the rationals of the open unit interval.

pub mod error;
pub mod hyper;
pub mod metrize;
pub mod quniform;
pub mod rational;
pub mod ratcover;
pub mod relcore;

pub use error::{Error, Result};
pub use hyper::{hyper_h, hyper_minus, hyper_plus, qh_equivalent, qh_finer, HyperRelation, QhVerdict};
pub use metrize::{kelley_metric, FiniteQuasiPseudometric};
pub use quniform::{FiniteQuasiUniformity, FiniteTopology};
pub use rational::Rational;
pub use relcore::{GroundSet, NormalSequence, Relation, Subset};

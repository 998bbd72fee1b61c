//! Exact covers of `(0,1) ∩ ℚ` by finite unions of rational intervals.
//!
//! Infinite statements about ω-indexed covers are checked exactly on every
//! materialized index and interval set, and at sample grids where an exact
//! check would range over infinitely many points. Every certificate records
//! which of its checks were exact and which were sampled. Nothing is
//! extended past the truncation depth: operations that need a deeper index
//! fail with [`CoverError::BeyondTruncation`].

mod certs;
mod check;
mod cover;
mod interval;
mod oracle;
mod refined;
mod star;

pub use certs::{
    cert_boundedhaus, cert_monotonecover, cert_monotonehaus, cert_not_entourage, BoundedHausCertificate,
    HausWitness, MonotoneCoverBranch, MonotoneCoverCertificate, MonotoneHausCertificate, MonotoneHausOutcome,
    NotEntourageCertificate, NotEntourageWitness, HAUS_PROBE_POINTS,
};
pub use check::{Check, CheckMode};
pub use cover::{chain_cover_from_sequence, dense_cover, pwm_via_metrics_check, OmegaCover, DEFAULT_DEPTH};
pub use interval::{Interval, RationalIntervalSet};
pub use oracle::{iv_image, MetricOracle};
pub use refined::{dense_scenario, probe_family, refined_base, BaseEntourage, DenseCertificate, RefinedBase};
pub use star::{
    connectivity_certificate, cover_normal_sequence, square_certificate, star_cover, ConnectivityCertificate,
    CoverNormalSequence, SquareCertificate, DEFAULT_GRID,
};

/// `U_𝒢(x)`: the successor of the smallest cover element containing `x`.
pub fn cover_successor_of_point(c: &OmegaCover, x: &crate::Rational) -> Result<RationalIntervalSet, CoverError> {
    c.successor_of_point(x).cloned()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoverError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("set {index} is empty")]
    EmptySet { index: usize },
    #[error("set {index} is the whole ground")]
    EqualsGround { index: usize },
    #[error("sets are not strictly increasing at {index}")]
    NotStrictlyIncreasing { index: usize },
    #[error("scales increase at {index}")]
    ScalesNotMonotone { index: usize },
    #[error("well-inside witness fails at n={index}: image escapes by {violation}")]
    WitnessFails { index: usize, violation: String },
    #[error("{what} lies beyond truncation depth {depth}")]
    BeyondTruncation { what: String, depth: usize },
    #[error("{0} is outside (0,1)")]
    OutsideGround(String),
    #[error("{set} is uniformly isolated at scale {scale}")]
    NotUniformlyConnected { set: String, scale: String },
    #[error("set {index} is uniformly isolated: its image does not grow")]
    UniformlyIsolated { index: usize },
    #[error("image of set {index} collides with its successor")]
    ImageCollides { index: usize },
    #[error("no witness point at scale {scale} within the truncation depth")]
    NoWitness { scale: String },
    #[error("certificate failed: {what}")]
    CertificateFailed { what: String },
}

//! Exact polyhedral computation for entropy regions.
//!
//! This crate mechanizes the polyhedral route to non-Shannon-type
//! information inequalities:
//!
//! * [`space`] — the coordinate system of joint-entropy space: subsets of a
//!   ground set index the coordinates, linear functionals with exact
//!   rational coefficients represent information inequalities and
//!   equalities.
//! * [`shannon`] — the Shannon cone generated by the elemental
//!   inequalities, and outer bounds built by adjoining known inequalities.
//! * [`copy`] — copy-lemma constraint systems: each copy step contributes
//!   two families of entropy equalities, and a scenario assembles them into
//!   a constrained cone over an enlarged ground set.
//! * [`lp`] — exact rational linear programming: inference checks with
//!   Farkas certificates, projection membership tests, and certificate
//!   validation. Everything is arbitrary precision; there is no floating
//!   point anywhere in the crate.
//! * [`project`] — projection of cones in H-representation, by the convex
//!   hull method (primary) or Fourier-Motzkin elimination (cross-check and
//!   small-case tool), plus LP-based redundancy removal and extreme-ray
//!   enumeration.
//! * [`derive`] — end-to-end pipelines: build a scenario cone, project it
//!   onto the base variables, classify the resulting facets as
//!   Shannon-implied / known / new, attach machine-checkable proofs, and
//!   iterate outer bounds.
//! * [`seq`] — the infinite family of four-variable non-Shannon
//!   inequalities that starts at a conditional mutual information and
//!   continues with the Zhang-Yeung inequality, with per-member
//!   certificates.
//! * [`io`] — line-oriented JSON file formats for functionals, rays,
//!   scenarios, certificates, and derivation reports.
//!
//! The `testkit` feature adds slow but independent oracles used by the
//! test suites (small rational distributions, exact entropy-combination
//! signs, a reference simplex); it is not part of the stable API.

#![forbid(unsafe_code)]

pub mod catalog;
pub mod copy;
pub mod derive;
pub mod io;
pub mod lp;
pub mod project;
pub mod seq;
pub mod shannon;
pub mod space;
#[cfg(feature = "testkit")]
pub mod testkit;

pub use copy::{CopyStep, Scenario};
pub use derive::{Classification, DeriveOutcome, FacetReport};
pub use lp::{Certificate, Inference};
pub use seq::SeqIndex;
pub use shannon::{beyond_shannon_closure, Cone};
pub use space::{EntVector, LinForm, Rat, Relation, SubsetMask};

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("ground-set size {0} out of range (expected 1..=16)")]
    GroundSetSize(usize),

    #[error("dimension mismatch: expected ground set of {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("variable {var} out of range for ground set of {n}")]
    VariableOutOfRange { var: usize, n: usize },

    #[error("substitution map is not injective")]
    NonInjectiveSubstitution,

    #[error("the empty set carries no coordinate; its coefficient must be zero")]
    NonzeroEmptySet,

    #[error("copy step parameters are not pairwise disjoint or reference the new variable")]
    CopyStepOverlap,

    #[error("malformed scenario: {0}")]
    Scenario(String),

    #[error("inference targets must be inequalities; split an equality into two checks")]
    EqualityTarget,

    #[error("certificate references constraint {index} but the cone has {len}")]
    CertificateIndex { index: usize, len: usize },

    #[error("keep set is empty or spans no coordinate")]
    DegenerateKeepSet,

    #[error("warm-start ray lies outside the projection")]
    WarmStartOutsideProjection,

    #[error("projection exceeded the ray budget of {budget} insertions")]
    RayBudgetExceeded { budget: usize },

    #[error("substitution closure would enumerate {maps} maps; ground set too large")]
    ClosureTooLarge { maps: u64 },

    #[error("sequence index must be at least 1")]
    SeqIndexRange,

    #[error("inference failed for a member of the inequality family: {0}")]
    FamilyInferenceFailed(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

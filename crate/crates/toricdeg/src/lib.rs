//! Exact toric intersection theory.
//!
//! Decides whether a divisor on a complete simplicial toric variety has low
//! toric degree, produces the certificates that make the answer checkable
//! (extremal curves, ray subsets, birational descent traces), and uses the
//! positive certificates to construct rational points of torus-invariant
//! hypersurfaces over prime fields.
//!
//! All arithmetic is exact (big integers and big rationals). Linear programs
//! run through Fourier–Motzkin elimination or an exact simplex, and every
//! certificate produced anywhere in the crate is re-verified by substitution
//! before it is returned.

pub mod fan;
pub mod intersection;
pub mod linalg;
pub mod mori;
pub mod polytope;

pub use fan::{Cone, Fan, StarFan, Wall};
pub use intersection::{CartierData, ClassGroupData, CurveClass, RestrictionData, TorusDivisor};
pub use linalg::{
    ConeMembership, Int, IntMat, IntVec, LinCon, Rat, RatMat, RatVec, Rel, SnfResult,
};
pub use mori::{
    BirationalStep, Contraction, ContractionKind, DescentOutcome, ExtremalRay,
    FiberingContraction, MmpState, StepKind, TraceEntry,
};
pub use polytope::{AmpleModel, GeneralizedFan, HPolytope, LatticePointSet};

/// Errors shared by every module of the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid fan: {0}")]
    InvalidFan(String),
    #[error("fan is not complete: {0}")]
    NotComplete(String),
    #[error("ray index {index} out of range for {count} rays")]
    RayIndexOutOfRange { index: usize, count: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("divisor is not integral: {0}")]
    NonIntegralDivisor(String),
    #[error("divisor is not Cartier: {0}")]
    NotCartier(String),
    #[error("divisor is not nef: {0}")]
    NotNef(String),
    #[error("degenerate wall: {0}")]
    DegenerateWall(String),
    #[error("polyhedron is unbounded: {0}")]
    UnboundedPolytope(String),
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal invariant failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

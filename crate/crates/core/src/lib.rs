//! Numerical toolkit for semistability under unipotent group actions.
//!
//! The pieces, bottom up:
//!
//! - [`lie`]: products of `SL(2)` and `SL(3)`, their compact forms, weights
//!   and Weyl groups.
//! - [`rep`]: representations built from standard, dual, adjoint, symmetric
//!   power, tensor and direct-sum operations, with invariant forms.
//! - [`moment`]: moment maps of flat, radial and Fubini-Study Kähler models.
//! - [`flow`]: Armijo descent of `|mu|^2` along orbits, certificates and
//!   point classification.
//! - [`cones`]: exact rational cones and the zero-fibre obstruction.
//! - [`scenario`]: complete unipotent scenarios and the built-in examples.
//! - [`verify`]: seeded property suites.

pub mod cones;
pub mod error;
pub mod flow;
pub mod lie;
pub mod moment;
pub mod rep;
pub mod scenario;
pub mod verify;

pub use cones::{Membership, ObstructionCertificate, Rational, RationalCone, RationalVector};
pub use error::{Error, Result};
pub use flow::{Certificate, CertificateKind, FlowConfig, FlowTrace, SliceReport, StabilitySetup, Verdict};
pub use lie::{
    AlgebraElement, AlgebraKind, CMatrix, CVector, CoadjointVector, GroupDescriptor, GroupElement, SimpleFactor,
    Weight, C64,
};
pub use moment::{KahlerModel, ModelPoint, MomentEvaluator, RadialFamily};
pub use rep::{ProjectivePoint, RepTree, Representation};
pub use scenario::{BuiltinScenario, ScenarioSpec, UnipotentScenario};

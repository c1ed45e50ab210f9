//! Curvature formulas and geometric-flow ODE systems for cohomogeneity-one
//! metrics `dt² + a1² (e¹)² + a2² ((e²)² + (e³)²)` over S³ and RP³.
//!
//! * [`geometry`] evaluates connection forms, curvature blocks, Ricci tensors,
//!   anti-self-duality residuals and contact-form pairings.
//! * [`flow`] defines the flow right-hand sides, the RK4 integrator with
//!   collapse detection and the time reparametrizations that turn round-sphere
//!   Ricci flow into constant-curvature 4-metrics.
//! * [`oracle`] holds closed-form solutions, first integrals and matchers used
//!   to validate integrator output.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod flow;
pub mod geometry;
pub mod oracle;

pub use error::{FlowError, GeometryError, OracleError};
pub use flow::{
    integrate, CurvatureSign, FlowKind, FlowState, IntegratorConfig, StopEvent, StopReason,
    Trajectory,
};
pub use geometry::TwoParamJet;

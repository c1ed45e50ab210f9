//! Flow right-hand sides, numerical integration and reparametrizations.

mod integrate;
pub mod reparam;
pub mod rhs;

use std::fmt;

pub use integrate::{integrate, IntegratorConfig, StopEvent, StopReason, Trajectory};

use crate::error::FlowError;

/// Sign of the sectional curvature `K ∈ {-1, 0, +1}` of a constant-curvature 4-space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CurvatureSign {
    Negative,
    Zero,
    Positive,
}

impl CurvatureSign {
    pub const ALL: [CurvatureSign; 3] = [Self::Negative, Self::Zero, Self::Positive];

    pub fn value(self) -> f64 {
        match self {
            Self::Negative => -1.0,
            Self::Zero => 0.0,
            Self::Positive => 1.0,
        }
    }
}

impl TryFrom<i32> for CurvatureSign {
    type Error = FlowError;

    fn try_from(k: i32) -> Result<Self, Self::Error> {
        match k {
            -1 => Ok(Self::Negative),
            0 => Ok(Self::Zero),
            1 => Ok(Self::Positive),
            other => Err(FlowError::Domain(format!(
                "K must be -1, 0 or 1, got {other}"
            ))),
        }
    }
}

impl fmt::Display for CurvatureSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value() as i32)
    }
}

/// Which ODE system is integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FlowKind {
    /// Ricci flow of the round sphere, state `[f]`.
    RicciRound,
    /// Conformal-factor flow sweeping a constant-curvature space, state `[f, f']`.
    Dirac { k: CurvatureSign },
    /// Ricci flow of the Berger sphere in `α = a1², β = a2²`, state `[α, β]`.
    RicciBerger,
    /// Volume-normalized Ricci flow, state `[a1, a2]`.
    NormalizedBerger,
    /// Anti-self-duality system (denominator-cleared), state `[a1, a2]`.
    AsdEguchiHanson,
    /// `∂t ḡ = ½ √det(Ric̄) Ric̄⁻¹`, state `[a1, a2]`.
    Flow9,
    /// `(∗ψ)' = d̄ψ` on the contact forms `ε¹, ε², ε³`, state `[a1, a2]`.
    HitchinContact,
}

impl FlowKind {
    pub fn dim(&self) -> usize {
        self.var_names().len()
    }

    pub fn var_names(&self) -> &'static [&'static str] {
        match self {
            Self::RicciRound => &["f"],
            Self::Dirac { .. } => &["f", "df"],
            Self::RicciBerger => &["alpha", "beta"],
            Self::NormalizedBerger | Self::AsdEguchiHanson | Self::Flow9 | Self::HitchinContact => {
                &["a1", "a2"]
            }
        }
    }

    /// Indices of state components that are metric scales (subject to collapse).
    pub fn metric_components(&self) -> &'static [usize] {
        match self {
            Self::RicciRound | Self::Dirac { .. } => &[0],
            _ => &[0, 1],
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::RicciRound => "ricci1",
            Self::Dirac { .. } => "dirac",
            Self::RicciBerger => "ricci2",
            Self::NormalizedBerger => "nricci2",
            Self::AsdEguchiHanson => "asd",
            Self::Flow9 => "flow9",
            Self::HitchinContact => "hitchin",
        }
    }

    /// Evaluate the right-hand side at `y`, writing into `dy`.
    pub fn rhs(&self, y: &[f64], dy: &mut [f64]) -> Result<(), FlowError> {
        match *self {
            Self::RicciRound => dy[0] = rhs::rhs_ricci_round(y[0])?,
            Self::Dirac { k } => {
                let [a, b] = rhs::rhs_dirac([y[0], y[1]], k);
                dy[0] = a;
                dy[1] = b;
            }
            Self::RicciBerger => (dy[0], dy[1]) = rhs::rhs_ricci_berger(y[0], y[1])?,
            Self::NormalizedBerger => (dy[0], dy[1]) = rhs::rhs_normalized_berger(y[0], y[1])?,
            Self::AsdEguchiHanson => (dy[0], dy[1]) = rhs::rhs_asd(y[0], y[1])?,
            Self::Flow9 => (dy[0], dy[1]) = rhs::rhs_flow9(y[0], y[1])?,
            Self::HitchinContact => (dy[0], dy[1]) = rhs::rhs_hitchin(y[0], y[1])?,
        }
        Ok(())
    }

    /// State to continue from after a collapse, when the flow admits a
    /// (non-Riemannian) continuation: for the Berger Ricci flow the fiber
    /// `α` is extended by zero.
    pub fn extend_past_collapse(&self, y: &[f64]) -> Option<Vec<f64>> {
        match self {
            Self::RicciBerger => Some(vec![0.0, y[1]]),
            _ => None,
        }
    }

    /// Right-hand side used beyond collapse, without domain checks.
    pub(crate) fn rhs_extended(&self, y: &[f64], dy: &mut [f64]) -> Result<(), FlowError> {
        match self {
            Self::RicciBerger => {
                (dy[0], dy[1]) = rhs::rhs_ricci_berger_extended(y[0], y[1]);
                Ok(())
            }
            other => other.rhs(y, dy),
        }
    }
}

impl fmt::Display for FlowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Dirac { k } => write!(f, "dirac(K={k})"),
            other => f.write_str(other.name()),
        }
    }
}

/// A point of a flow: parameter value and state components in the kind's layout.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub t: f64,
    pub vars: Vec<f64>,
}

impl FlowState {
    pub fn new(t: f64, vars: impl Into<Vec<f64>>) -> Self {
        Self {
            t,
            vars: vars.into(),
        }
    }
}

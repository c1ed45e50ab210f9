use thiserror::Error;

use crate::flow::Trajectory;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("jet has no second derivatives")]
    MissingSecondDerivatives,
}

impl GeometryError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Self::Domain(msg.into())
    }
}

#[derive(Debug, Error)]
pub enum FlowError {
    #[error("domain error: {0}")]
    Domain(String),
    /// The state left the region where the flow is defined (not a hard error
    /// for the integrator, which reports it as a stop event).
    #[error("domain exit: {0}")]
    DomainExit(String),
    #[error("invalid integrator config: {0}")]
    InvalidConfig(String),
    #[error("invalid initial state: {0}")]
    InvalidInitialState(String),
    #[error("non-finite state near t = {t}")]
    NonFinite { t: f64, trajectory: Box<Trajectory> },
    #[error("trajectory exceeds the sample budget of {max_samples}")]
    SampleBudgetExceeded { max_samples: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("argument out of domain: {0}")]
    OutOfDomain(String),
    #[error("a2 is not strictly increasing at sample {index}; cannot reparametrize by a2")]
    NonMonotone { index: usize },
    #[error("need at least {needed} usable samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("no sample on the real branch of the implicit solution (requires beta' > -8)")]
    BranchUnavailable,
    #[error("trajectory did not reach collapse")]
    NoCollapse,
    #[error("oracle does not apply to flow {0}")]
    Inapplicable(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Flow(#[from] FlowError),
}

//! Closed-form solutions, first integrals and matchers used as ground truth
//! for integrator output.

mod berger;
mod eh;
mod jets;

pub use berger::{
    alpha_first_integral, beta_second_order_residual, implicit7_check, singularity_slopes,
    Implicit7Report, SingularitySlopes,
};
pub use eh::{eh_jet, eh_match, eh_profile, eh_radius_at, eh_time_from_bolt, EhPoint};
pub use jets::{asd_report, einstein_report, einstein_residual, trajectory_jets, JetSample};

use crate::error::OracleError;
use crate::flow::{rhs, CurvatureSign, FlowKind, FlowState, Trajectory};

/// An exactly known solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleKind {
    /// `f_K ∈ {sinh t, t, sin t}`, state `[f, f']`.
    DiracProfile { k: CurvatureSign },
    /// `f = √(8(t0 - t))`.
    RicciRoundProfile { t0: f64 },
    /// `α = β = 8(t0 - t)`.
    Nut { t0: f64 },
    /// `α = 0, β = 16(t0 - t)`.
    Bolt { t0: f64 },
    /// Eguchi-Hanson in the arclength parameter from the bolt, state `[a1, a2]`.
    EguchiHanson { a: f64 },
}

impl OracleKind {
    fn validate(&self) -> Result<(), OracleError> {
        match *self {
            Self::RicciRoundProfile { t0 } | Self::Nut { t0 } | Self::Bolt { t0 }
                if !t0.is_finite() =>
            {
                Err(OracleError::OutOfDomain(format!("t0 = {t0} is not finite")))
            }
            Self::EguchiHanson { a } if !(a > 0.0 && a.is_finite()) => Err(
                OracleError::OutOfDomain(format!("a = {a} must be positive")),
            ),
            _ => Ok(()),
        }
    }

    /// Whether trajectories of `flow` can be compared against this solution.
    pub fn applies_to(&self, flow: FlowKind) -> bool {
        match (self, flow) {
            (Self::DiracProfile { k }, FlowKind::Dirac { k: fk }) => *k == fk,
            (Self::RicciRoundProfile { .. }, FlowKind::RicciRound) => true,
            (Self::Nut { .. } | Self::Bolt { .. }, FlowKind::RicciBerger) => true,
            (Self::EguchiHanson { .. }, FlowKind::AsdEguchiHanson | FlowKind::HitchinContact) => {
                true
            }
            _ => false,
        }
    }
}

fn collapsing(t: f64, t0: f64) -> Result<f64, OracleError> {
    if !(t <= t0) {
        return Err(OracleError::OutOfDomain(format!(
            "t = {t} is past the collapse time {t0}"
        )));
    }
    Ok(t0 - t)
}

/// Value of the closed-form solution at `t`.
pub fn closed_form(kind: OracleKind, t: f64) -> Result<FlowState, OracleError> {
    kind.validate()?;
    if !t.is_finite() {
        return Err(OracleError::OutOfDomain(format!("t = {t} is not finite")));
    }
    let vars = match kind {
        OracleKind::DiracProfile { k } => match k {
            CurvatureSign::Negative => vec![t.sinh(), t.cosh()],
            CurvatureSign::Zero => vec![t, 1.0],
            CurvatureSign::Positive => {
                let (s, c) = t.sin_cos();
                vec![s, c]
            }
        },
        OracleKind::RicciRoundProfile { t0 } => vec![(8.0 * collapsing(t, t0)?).sqrt()],
        OracleKind::Nut { t0 } => {
            let v = 8.0 * collapsing(t, t0)?;
            vec![v, v]
        }
        OracleKind::Bolt { t0 } => vec![0.0, 16.0 * collapsing(t, t0)?],
        OracleKind::EguchiHanson { a } => {
            if t < 0.0 {
                return Err(OracleError::OutOfDomain(format!(
                    "t = {t} is before the bolt"
                )));
            }
            let (a1, a2) = eh::profile_at_time(a, t);
            vec![a1, a2]
        }
    };
    Ok(FlowState::new(t, vars))
}

/// Worst deviation over a set of sampled comparisons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchReport {
    /// `+∞` if any comparison was not finite.
    pub max_abs_deviation: f64,
    /// Abscissa (usually `t`) of the worst comparison.
    pub location_of_max: f64,
    pub n_points: usize,
    pub tolerance: f64,
    pub passed: bool,
}

impl MatchReport {
    /// Build from `(location, deviation)` pairs. An empty set does not pass.
    pub fn from_deviations(points: impl IntoIterator<Item = (f64, f64)>, tolerance: f64) -> Self {
        let mut max = 0.0_f64;
        let mut loc = f64::NAN;
        let mut n = 0;
        for (x, d) in points {
            n += 1;
            let d = if d.is_finite() {
                d.abs()
            } else {
                f64::INFINITY
            };
            if d > max || loc.is_nan() {
                max = d;
                loc = x;
            }
        }
        Self {
            max_abs_deviation: max,
            location_of_max: loc,
            n_points: n,
            tolerance,
            passed: n > 0 && max <= tolerance,
        }
    }
}

fn riemannian_samples(traj: &Trajectory) -> impl Iterator<Item = &FlowState> + '_ {
    traj.samples
        .iter()
        .enumerate()
        .filter(|(i, _)| !traj.is_nonriemannian(*i))
        .map(|(_, s)| s)
}

/// Compare every state component to the closed form, sample by sample. For
/// the round Ricci profile the deviation is measured on `f²`.
pub fn closed_form_match(
    traj: &Trajectory,
    kind: OracleKind,
    tolerance: f64,
) -> Result<MatchReport, OracleError> {
    if !kind.applies_to(traj.kind) {
        return Err(OracleError::Inapplicable(traj.kind.to_string()));
    }
    let mut points = Vec::with_capacity(traj.samples.len());
    for s in riemannian_samples(traj) {
        let exact = closed_form(kind, s.t)?;
        let dev = match kind {
            // f = √(8(t0 - t)) is infinitely sensitive at collapse; compare f²
            OracleKind::RicciRoundProfile { .. } => {
                (s.vars[0].powi(2) - exact.vars[0].powi(2)).abs()
            }
            _ => s
                .vars
                .iter()
                .zip(&exact.vars)
                .map(|(x, e)| (x - e).abs())
                .fold(0.0, f64::max),
        };
        points.push((s.t, dev));
    }
    Ok(MatchReport::from_deviations(points, tolerance))
}

/// Drift of `a1·a2²` (the volume density) from its initial value.
pub fn volume_drift(traj: &Trajectory, tolerance: f64) -> Result<MatchReport, OracleError> {
    if traj.kind != FlowKind::NormalizedBerger {
        return Err(OracleError::Inapplicable(traj.kind.to_string()));
    }
    let vol = |s: &FlowState| s.vars[0] * s.vars[1] * s.vars[1];
    let v0 = vol(&traj.samples[0]);
    Ok(MatchReport::from_deviations(
        riemannian_samples(traj).map(|s| (s.t, vol(s) - v0)),
        tolerance,
    ))
}

/// Drift of `f² + 8t`, conserved by the round Ricci flow.
pub fn round_first_integral(traj: &Trajectory, tolerance: f64) -> Result<MatchReport, OracleError> {
    if traj.kind != FlowKind::RicciRound {
        return Err(OracleError::Inapplicable(traj.kind.to_string()));
    }
    let q = |s: &FlowState| s.vars[0].mul_add(s.vars[0], 8.0 * s.t);
    let q0 = q(&traj.samples[0]);
    Ok(MatchReport::from_deviations(
        riemannian_samples(traj).map(|s| (s.t, q(s) - q0)),
        tolerance,
    ))
}

/// `|f'² + K f² - 1|` along a conformal-factor trajectory.
pub fn dirac_constraint_report(
    traj: &Trajectory,
    tolerance: f64,
) -> Result<MatchReport, OracleError> {
    let FlowKind::Dirac { k } = traj.kind else {
        return Err(OracleError::Inapplicable(traj.kind.to_string()));
    };
    Ok(MatchReport::from_deviations(
        traj.samples
            .iter()
            .map(|s| (s.t, rhs::dirac_constraint(s.vars[0], s.vars[1], k))),
        tolerance,
    ))
}

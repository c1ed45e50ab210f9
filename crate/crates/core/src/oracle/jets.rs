use super::MatchReport;
use crate::error::{GeometryError, OracleError};
use crate::flow::{CurvatureSign, FlowKind, Trajectory};
use crate::geometry::{self, TwoParamJet};

const UNIFORM_REL_TOL: f64 = 1e-6;

/// Interior sample indices whose two neighbours are equally spaced, with the
/// spacing. Samples past a collapse are excluded from every stencil.
pub(crate) fn uniform_stencils(traj: &Trajectory) -> Vec<(usize, f64)> {
    let s = &traj.samples;
    (1..s.len().saturating_sub(1))
        .filter(|&i| !traj.is_nonriemannian(i + 1))
        .filter_map(|i| {
            let h0 = s[i].t - s[i - 1].t;
            let h1 = s[i + 1].t - s[i].t;
            ((h1 - h0).abs() <= UNIFORM_REL_TOL * h0.max(h1)).then_some((i, 0.5 * (h0 + h1)))
        })
        .collect()
}

/// A jet reconstructed at one trajectory sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JetSample {
    pub index: usize,
    pub t: f64,
    pub jet: TwoParamJet,
}

/// Metric scales `(a1, a2)` of a state, plus `f'` when the flow carries it.
fn scales(kind: FlowKind, vars: &[f64]) -> (f64, f64, Option<f64>) {
    match kind {
        FlowKind::RicciRound => (vars[0], vars[0], None),
        FlowKind::Dirac { .. } => (vars[0], vars[0], Some(vars[1])),
        FlowKind::RicciBerger => (vars[0].max(0.0).sqrt(), vars[1].max(0.0).sqrt(), None),
        _ => (vars[0], vars[1], None),
    }
}

/// Second-order central-difference jets at every interior sample with a
/// uniform stencil. When the state carries `f'` it is used directly and only
/// `f''` is differenced.
pub fn trajectory_jets(traj: &Trajectory) -> Vec<JetSample> {
    let kind = traj.kind;
    uniform_stencils(traj)
        .into_iter()
        .map(|(i, h)| {
            let m = scales(kind, &traj.samples[i - 1].vars);
            let c = scales(kind, &traj.samples[i].vars);
            let p = scales(kind, &traj.samples[i + 1].vars);
            let d1 = |a: f64, b: f64| (b - a) / (2.0 * h);
            let d2 = |a: f64, b: f64, c: f64| (c - 2.0 * b + a) / (h * h);
            let jet = match (m.2, c.2, p.2) {
                (Some(dm), Some(dc), Some(dp)) => TwoParamJet::round(c.0, dc, Some(d1(dm, dp))),
                _ => TwoParamJet::new(c.0, c.1, d1(m.0, p.0), d1(m.1, p.1))
                    .with_second(d2(m.0, c.0, p.0), d2(m.1, c.1, p.1)),
            };
            JetSample {
                index: i,
                t: traj.samples[i].t,
                jet,
            }
        })
        .collect()
}

/// `max_i |Ric_ii - 6K|` of the ambient metric.
pub fn einstein_residual(jet: &TwoParamJet, k: CurvatureSign) -> Result<f64, OracleError> {
    let ric = geometry::ricci_ambient(jet)?;
    let target = 6.0 * k.value();
    let r00 = ric.ric00.ok_or(GeometryError::MissingSecondDerivatives)?;
    Ok([r00, ric.ric11, ric.ric22, ric.ric33]
        .iter()
        .map(|r| (r - target).abs())
        .fold(0.0, f64::max))
}

/// [`einstein_residual`] on the finite-difference jets of a trajectory.
/// Samples where the metric degenerates (a scale is zero) are skipped.
pub fn einstein_report(
    traj: &Trajectory,
    k: CurvatureSign,
    tolerance: f64,
) -> Result<MatchReport, OracleError> {
    let mut points = Vec::new();
    for s in trajectory_jets(traj) {
        if !(s.jet.a1 > 0.0 && s.jet.a2 > 0.0) {
            continue;
        }
        points.push((s.t, einstein_residual(&s.jet, k)?));
    }
    Ok(MatchReport::from_deviations(points, tolerance))
}

/// Anti-self-duality residuals of a two-scale trajectory, with velocities
/// taken from the flow's own right-hand side. Samples at `a1 = 0` are skipped.
pub fn asd_report(traj: &Trajectory, tolerance: f64) -> Result<MatchReport, OracleError> {
    if !matches!(
        traj.kind,
        FlowKind::AsdEguchiHanson | FlowKind::Flow9 | FlowKind::HitchinContact
    ) {
        return Err(OracleError::Inapplicable(traj.kind.to_string()));
    }
    let mut points = Vec::new();
    let mut dy = [0.0; 2];
    for s in &traj.samples {
        if !(s.vars[0] > 0.0) {
            continue;
        }
        traj.kind.rhs(&s.vars, &mut dy)?;
        let jet = TwoParamJet::new(s.vars[0], s.vars[1], dy[0], dy[1]);
        points.push((s.t, geometry::asd_residual(&jet)?.max_abs()));
    }
    Ok(MatchReport::from_deviations(points, tolerance))
}

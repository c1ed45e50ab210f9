use super::jets::uniform_stencils;
use crate::error::OracleError;
use crate::flow::{rhs, FlowKind, StopReason, Trajectory};

const SQRT2: f64 = std::f64::consts::SQRT_2;

fn require_berger(traj: &Trajectory) -> Result<(), OracleError> {
    if traj.kind != FlowKind::RicciBerger {
        return Err(OracleError::Inapplicable(traj.kind.to_string()));
    }
    Ok(())
}

/// `ββ'' + 2β'² + 48β' + 256` with `β'`, `β''` from second-order central
/// differences, at each interior sample with a uniform stencil.
pub fn beta_second_order_residual(traj: &Trajectory) -> Result<Vec<(f64, f64)>, OracleError> {
    require_berger(traj)?;
    let stencils = uniform_stencils(traj);
    // five samples give at least three interior points
    if stencils.len() < 3 {
        return Err(OracleError::TooFewSamples {
            needed: 5,
            got: stencils.len() + 2,
        });
    }
    Ok(stencils
        .into_iter()
        .map(|(i, h)| {
            let b = |j: usize| traj.samples[j].vars[1];
            let (bm, b0, bp) = (b(i - 1), b(i), b(i + 1));
            let d1 = (bp - bm) / (2.0 * h);
            let d2 = (bp - 2.0 * b0 + bm) / (h * h);
            let res = b0 * d2 + 2.0 * d1 * d1 + 48.0 * d1 + 256.0;
            (traj.samples[i].t, res)
        })
        .collect())
}

/// `α - β(β' + 16)/8`: zero when `β'` takes its flow value.
pub fn alpha_first_integral(alpha: f64, beta: f64, dbeta: f64) -> f64 {
    alpha - beta * (dbeta + 16.0) / 8.0
}

/// Constants fitted to the implicit solution and its defects.
#[derive(Debug, Clone, PartialEq)]
pub struct Implicit7Report {
    pub c1: f64,
    pub c2: f64,
    /// Sample the constants were fitted at.
    pub fit_index: usize,
    /// `(t, L(β) - t - c2)` at the other real-branch samples.
    pub residuals: Vec<(f64, f64)>,
    /// `(t, dL/dt - 1)` with `dL/dt` from central differences of `L` along the
    /// trajectory, at real-branch samples with uniform stencils.
    pub rate_residuals: Vec<(f64, f64)>,
}

impl Implicit7Report {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().map(|r| r.1.abs()).fold(0.0, f64::max)
    }

    pub fn max_rate_residual(&self) -> f64 {
        self.rate_residuals
            .iter()
            .map(|r| r.1.abs())
            .fold(0.0, f64::max)
    }
}

/// Check `-β/16 - (√2/128) c1 θ = t + c2` with `θ = arctan(4√2β / s)`,
/// `s² = c1² - 32β²`.
///
/// The sign of `s` follows `-c1 β'` so it changes where `β'` does; `θ` is
/// taken on the continuous branch in `(0, π)`.
pub fn implicit7_check(traj: &Trajectory) -> Result<Implicit7Report, OracleError> {
    require_berger(traj)?;
    // (index, t, β, β')
    let valid: Vec<(usize, f64, f64, f64)> = traj
        .samples
        .iter()
        .enumerate()
        .filter(|(i, s)| !traj.is_nonriemannian(*i) && s.vars[0] > 0.0 && s.vars[1] > 0.0)
        .map(|(i, s)| (i, s.t, s.vars[1], 8.0 * s.vars[0] / s.vars[1] - 16.0))
        .filter(|v| v.3 > -8.0)
        .collect();
    if valid.is_empty() {
        return Err(OracleError::BranchUnavailable);
    }
    if valid.len() < 2 {
        return Err(OracleError::TooFewSamples { needed: 2, got: 1 });
    }
    let fit = valid
        .iter()
        .position(|v| v.3 != 0.0)
        .ok_or(OracleError::BranchUnavailable)?;
    let (fit_index, t_fit, b_fit, bp_fit) = valid[fit];
    let s_fit = (b_fit * b_fit * bp_fit * bp_fit / (8.0 + bp_fit)).sqrt();
    let c1 = -s_fit * (16.0 + bp_fit) / bp_fit;

    let signed_s = |b: f64, bp: f64| {
        let s = (c1 * c1 - 32.0 * b * b).max(0.0).sqrt();
        if -c1 * bp >= 0.0 {
            s
        } else {
            -s
        }
    };
    let lhs = |b: f64, bp: f64| {
        let theta = (4.0 * SQRT2 * b).atan2(signed_s(b, bp));
        -b / 16.0 - SQRT2 / 128.0 * c1 * theta
    };
    let c2 = lhs(b_fit, bp_fit) - t_fit;

    let residuals = valid
        .iter()
        .filter(|v| v.0 != fit_index)
        .map(|&(_, t, b, bp)| (t, lhs(b, bp) - t - c2))
        .collect();
    let on_branch: std::collections::HashMap<usize, (f64, f64)> =
        valid.iter().map(|&(i, _, b, bp)| (i, (b, bp))).collect();
    let rate_residuals = uniform_stencils(traj)
        .into_iter()
        .filter_map(|(i, h)| {
            let l = |j: usize| on_branch.get(&j).map(|&(b, bp)| lhs(b, bp));
            let rate = (l(i + 1)? - l(i - 1)?) / (2.0 * h);
            Some((traj.samples[i].t, rate - 1.0))
        })
        .collect();
    Ok(Implicit7Report {
        c1,
        c2,
        fit_index,
        residuals,
        rate_residuals,
    })
}

/// Flow velocities at the approach to collapse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularitySlopes {
    pub t: f64,
    pub alpha: f64,
    pub dalpha: f64,
    pub dbeta: f64,
}

/// Evaluate `(α', β')` at the last sample with `α < 10⁻³ α(0)`.
pub fn singularity_slopes(traj: &Trajectory) -> Result<SingularitySlopes, OracleError> {
    require_berger(traj)?;
    let alpha0 = traj.samples[0].vars[0];
    if !(alpha0 > 0.0) {
        return Err(OracleError::OutOfDomain(format!(
            "alpha(0) = {alpha0} must be positive"
        )));
    }
    if !matches!(traj.stop.reason, StopReason::Collapse { .. }) {
        return Err(OracleError::NoCollapse);
    }
    let threshold = 1e-3 * alpha0;
    let (_, s) = traj
        .samples
        .iter()
        .enumerate()
        .rfind(|(i, s)| !traj.is_nonriemannian(*i) && s.vars[0] < threshold)
        .ok_or(OracleError::NoCollapse)?;
    let (dalpha, dbeta) = rhs::rhs_ricci_berger(s.vars[0], s.vars[1])?;
    Ok(SingularitySlopes {
        t: s.t,
        alpha: s.vars[0],
        dalpha,
        dbeta,
    })
}

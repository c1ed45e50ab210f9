//! Time changes `τ = h_K(t)` under which the round-sphere Ricci flow
//! `∂τ ḡ = -2 Ric̄` sweeps the constant-curvature profiles `f_K ∈ {sinh t, t, sin t}`.
//!
//! Matching `∂τ ḡ = -2 Ric̄` in the orthonormal frame forces
//! `dτ/dt = -f_K f_K' / 4`, i.e. `h_K = C - f_K² / 8` for every `K`. The
//! additive constant is taken to be zero.

use crate::error::FlowError;
use crate::flow::CurvatureSign;
use crate::geometry;

fn check_domain(k: CurvatureSign, t: f64) -> Result<(), FlowError> {
    let ok = match k {
        CurvatureSign::Positive => t > 0.0 && t < std::f64::consts::PI,
        _ => t > 0.0 && t.is_finite(),
    };
    if ok {
        Ok(())
    } else {
        Err(FlowError::Domain(format!(
            "t = {t} outside the profile domain for K = {k}"
        )))
    }
}

/// `(f_K(t), f_K'(t))`.
fn profile(k: CurvatureSign, t: f64) -> (f64, f64) {
    match k {
        CurvatureSign::Negative => (t.sinh(), t.cosh()),
        CurvatureSign::Zero => (t, 1.0),
        CurvatureSign::Positive => t.sin_cos(),
    }
}

/// `τ = h_K(t) = -f_K(t)² / 8`.
pub fn tau_reparametrization(k: CurvatureSign, t: f64) -> Result<f64, FlowError> {
    check_domain(k, t)?;
    let f = profile(k, t).0;
    Ok(-f * f / 8.0)
}

/// `dτ/dt = h_K'(t)`, written per profile.
pub fn tau_rate(k: CurvatureSign, t: f64) -> Result<f64, FlowError> {
    check_domain(k, t)?;
    Ok(match k {
        CurvatureSign::Negative => -(2.0 * t).sinh() / 8.0,
        CurvatureSign::Zero => -t / 4.0,
        CurvatureSign::Positive => -(2.0 * t).sin() / 8.0,
    })
}

/// `|(∂t ḡ)/(dτ/dt) + 2 Ric̄|` in the orthonormal frame along the profile `f_K`.
///
/// The frame-normalized metric rate is `2 f'/f` and `Ric̄ = 4/f²`.
pub fn verify_prop1(k: CurvatureSign, t: f64) -> Result<f64, FlowError> {
    prop1_residual_with_rate(k, t, tau_rate(k, t)?)
}

pub(crate) fn prop1_residual_with_rate(
    k: CurvatureSign,
    t: f64,
    dtau_dt: f64,
) -> Result<f64, FlowError> {
    check_domain(k, t)?;
    if dtau_dt == 0.0 {
        return Err(FlowError::Domain(format!(
            "dτ/dt vanishes at t = {t}; the time change is singular there"
        )));
    }
    let (f, df) = profile(k, t);
    let ric = geometry::ricci_bar(f, f)?;
    let metric_rate = 2.0 * df / f;
    Ok((metric_rate / dtau_dt + 2.0 * ric.ric11).abs())
}

use super::MatchReport;
use crate::error::OracleError;
use crate::flow::{FlowKind, Trajectory};
use crate::geometry::TwoParamJet;

/// A point of the Eguchi-Hanson profile at radius `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EhPoint {
    pub a1: f64,
    pub a2: f64,
    /// `dt/dr`; infinite at the bolt `r = a`.
    pub dt_dr: f64,
}

/// `1 - (a/r)⁴`, factored to keep precision near the bolt.
fn one_minus_ratio4(a: f64, r: f64) -> f64 {
    (r - a) * (r + a) * (r * r + a * a) / (r * r * r * r)
}

fn check(a: f64, r: f64) -> Result<(), OracleError> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(OracleError::OutOfDomain(format!(
            "a = {a} must be positive"
        )));
    }
    if !(r >= a && r.is_finite()) {
        return Err(OracleError::OutOfDomain(format!(
            "r = {r} is inside the bolt radius {a}"
        )));
    }
    Ok(())
}

pub fn eh_profile(a: f64, r: f64) -> Result<EhPoint, OracleError> {
    check(a, r)?;
    let q2 = one_minus_ratio4(a, r);
    let q = q2.sqrt();
    Ok(EhPoint {
        a1: r * q,
        a2: r,
        dt_dr: if q2 == 0.0 { f64::INFINITY } else { 1.0 / q },
    })
}

/// Exact jet in the arclength parameter `t`, using `d/dt = √(1 - (a/r)⁴) d/dr`.
pub fn eh_jet(a: f64, r: f64) -> Result<TwoParamJet, OracleError> {
    check(a, r)?;
    let p = eh_profile(a, r)?;
    let q = p.a1 / r;
    let ar4 = (a / r).powi(4);
    let da1 = 1.0 + ar4;
    let da2 = q;
    let dda1 = -4.0 * ar4 / r * q;
    let dda2 = 2.0 * ar4 / r;
    Ok(TwoParamJet::new(p.a1, p.a2, da1, da2).with_second(dda1, dda2))
}

// 5-point Gauss-Legendre on [-1, 1]
const GL_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];
const GL_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_08,
    0.478_628_670_499_366_47,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_47,
    0.236_926_885_056_189_08,
];
const PANELS: usize = 64;

/// Arclength from the bolt to radius `r`: `∫_a^r dr / √(1 - (a/r)⁴)`.
///
/// With `r = a + s²` the integrand becomes `2r² / √((r + a)(r² + a²))`,
/// which is smooth in `s`.
pub fn eh_time_from_bolt(a: f64, r: f64) -> Result<f64, OracleError> {
    check(a, r)?;
    Ok(time_from_sqrt_gap(a, (r - a).sqrt()))
}

/// Arclength from the bolt as a function of `s = √(r - a)`.
/// `dt/ds` for `r = a + s²`.
fn rate_in_sqrt_gap(a: f64, s: f64) -> f64 {
    let r = a + s * s;
    2.0 * r * r / ((r + a) * (r * r + a * a)).sqrt()
}

fn time_from_sqrt_gap(a: f64, upper: f64) -> f64 {
    if upper == 0.0 {
        return 0.0;
    }
    let h = upper / PANELS as f64;
    let mut sum = 0.0;
    for p in 0..PANELS {
        let mid = (p as f64 + 0.5) * h;
        for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
            sum += w * rate_in_sqrt_gap(a, mid + 0.5 * h * x);
        }
    }
    sum * 0.5 * h
}

/// `√(r - a)` at arclength `t` from the bolt: Newton on the monotone map
/// `s -> t`, kept inside a shrinking bracket. Since `dt/dr ≥ 1`, `r - a ≤ t`.
fn sqrt_gap_at(a: f64, t: f64) -> f64 {
    let (mut lo, mut hi) = (0.0_f64, t.sqrt());
    let mut s = 0.5 * hi;
    for _ in 0..200 {
        let f = time_from_sqrt_gap(a, s) - t;
        if f < 0.0 {
            lo = s;
        } else {
            hi = s;
        }
        let mut next = s - f / rate_in_sqrt_gap(a, s);
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - s).abs() <= 4.0 * f64::EPSILON * s.abs().max(f64::MIN_POSITIVE)
            || hi - lo <= f64::EPSILON * hi
        {
            return next;
        }
        s = next;
    }
    s
}

/// Radius reached at arclength `t` from the bolt; inverse of [`eh_time_from_bolt`].
pub fn eh_radius_at(a: f64, t: f64) -> Result<f64, OracleError> {
    check(a, a)?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(OracleError::OutOfDomain(format!(
            "t = {t} must be non-negative"
        )));
    }
    let s = sqrt_gap_at(a, t);
    Ok(a + s * s)
}

/// `(a1, a2)` at arclength `t`, evaluated from `s = √(r - a)` so that
/// precision is kept at the bolt.
pub(crate) fn profile_at_time(a: f64, t: f64) -> (f64, f64) {
    let s = sqrt_gap_at(a, t);
    let r = a + s * s;
    let q = s * ((r + a) * (r * r + a * a)).sqrt() / (r * r);
    (r * q, r)
}

/// Compare `a1` with `a2·√(1 - (a/a2)⁴)` sample by sample, using `a2` as the
/// radius so that no time reparametrization is needed.
pub fn eh_match(traj: &Trajectory, a: f64, tolerance: f64) -> Result<MatchReport, OracleError> {
    if !matches!(
        traj.kind,
        FlowKind::AsdEguchiHanson | FlowKind::Flow9 | FlowKind::HitchinContact
    ) {
        return Err(OracleError::Inapplicable(traj.kind.to_string()));
    }
    check(a, a)?;
    for (i, w) in traj.samples.windows(2).enumerate() {
        if !(w[1].vars[1] > w[0].vars[1]) {
            return Err(OracleError::NonMonotone { index: i + 1 });
        }
    }
    let mut points = Vec::with_capacity(traj.samples.len());
    for s in &traj.samples {
        let (a1, a2) = (s.vars[0], s.vars[1]);
        let predicted = if a2 >= a {
            eh_profile(a, a2)?.a1
        } else {
            f64::NAN
        };
        points.push((s.t, a1 - predicted));
    }
    Ok(MatchReport::from_deviations(points, tolerance))
}

//! Right-hand sides of the flows. All are pure functions of the state.

use crate::error::FlowError;
use crate::flow::CurvatureSign;
use crate::geometry::{self, FrameAxis, TwoParamJet};

fn domain(msg: &str) -> FlowError {
    FlowError::Domain(msg.to_owned())
}

/// Round-sphere Ricci flow: `2f'/f = -2 Ric̄₁₁ = -8/f²`, i.e. `f' = -4/f`.
pub fn rhs_ricci_round(f: f64) -> Result<f64, FlowError> {
    if !(f > 0.0) {
        return Err(domain("f must be positive"));
    }
    let ric = geometry::ricci_bar(f, f)?;
    Ok(-f * ric.ric11)
}

/// Second-order form `f'' = -K f` of the conformal-factor flow. The first-order
/// constraint `f'² + K f² = 1` is a conserved quantity of this system.
pub fn rhs_dirac(state: [f64; 2], k: CurvatureSign) -> [f64; 2] {
    [state[1], -k.value() * state[0]]
}

/// Value of `f'² + K f² - 1`, zero on solutions with `f(0) = 0, f'(0) = 1`.
pub fn dirac_constraint(f: f64, df: f64, k: CurvatureSign) -> f64 {
    df.mul_add(df, k.value() * f * f) - 1.0
}

/// Berger-sphere Ricci flow in `α = a1², β = a2²`.
pub fn rhs_ricci_berger(alpha: f64, beta: f64) -> Result<(f64, f64), FlowError> {
    if !(beta > 0.0) {
        return Err(domain("beta must be positive"));
    }
    if !(alpha >= 0.0) {
        return Err(domain("alpha must be non-negative"));
    }
    let r = alpha / beta;
    Ok((-8.0 * r * r, 8.0 * r - 16.0))
}

/// Continuation beyond collapse: no sign checks, and the collapsed fiber
/// `α = 0` always follows the bolt branch `β' = -16`.
pub(crate) fn rhs_ricci_berger_extended(alpha: f64, beta: f64) -> (f64, f64) {
    if alpha == 0.0 {
        return (0.0, -16.0);
    }
    let r = alpha / beta;
    (-8.0 * r * r, 8.0 * r - 16.0)
}

/// Volume-preserving normalized Ricci flow.
pub fn rhs_normalized_berger(a1: f64, a2: f64) -> Result<(f64, f64), FlowError> {
    if !(a1 > 0.0 && a2 > 0.0) {
        return Err(domain("a1 and a2 must be positive"));
    }
    let a2sq = a2 * a2;
    let diff = a1 * a1 - a2sq;
    Ok((
        -16.0 / 3.0 * a1 / (a2sq * a2sq) * diff,
        8.0 / 3.0 * diff / (a2sq * a2),
    ))
}

/// Anti-self-duality system with cleared denominators, regular at `a1 = 0`.
pub fn rhs_asd(a1: f64, a2: f64) -> Result<(f64, f64), FlowError> {
    if !(a2 > 0.0) {
        return Err(domain("a2 must be positive"));
    }
    if !(a1 >= 0.0) {
        return Err(domain("a1 must be non-negative"));
    }
    let r = a1 / a2;
    Ok((2.0 - r * r, r))
}

/// `∂t ḡ = ½ √det(Ric̄) Ric̄⁻¹` expressed through the restricted Ricci tensor:
/// `a1'/a1 = ½ Ric̄₂₂ Ric̄₁₁^{-1/2}` and `a2'/a2 = ½ Ric̄₁₁^{1/2}`.
///
/// Leaving `{0 < a1 < √2 a2}` (where `Ric̄` is positive definite) is reported
/// as [`FlowError::DomainExit`].
pub fn rhs_flow9(a1: f64, a2: f64) -> Result<(f64, f64), FlowError> {
    if !(a2 > 0.0) {
        return Err(domain("a2 must be positive"));
    }
    if !(a1 > 0.0) {
        return Err(FlowError::DomainExit("a1 = 0: Ric̄₁₁ vanishes".into()));
    }
    let ric = geometry::ricci_bar(a1, a2)?;
    if !(ric.ric22 > 0.0) {
        return Err(FlowError::DomainExit("a1² ≥ 2 a2²: Ric̄₂₂ ≤ 0".into()));
    }
    let root = ric.ric11.sqrt();
    Ok((a1 * 0.5 * ric.ric22 / root, a2 * 0.5 * root))
}

/// Solves `(∗ψ)' = d̄ψ` for `(a1', a2')`. The `ψ = ε¹` equation fixes `a2'`,
/// then `ψ = ε²` (equivalently `ε³`) fixes `a1'`.
pub fn rhs_hitchin(a1: f64, a2: f64) -> Result<(f64, f64), FlowError> {
    if !(a2 > 0.0) {
        return Err(domain("a2 must be positive"));
    }
    if !(a1 >= 0.0) {
        return Err(domain("a1 must be non-negative"));
    }
    let s = geometry::FrameConvention::STRUCTURE_CONSTANT;
    // 2 a2 a2' = s a1
    let da2 = s * a1 / (2.0 * a2);
    // a2 a1' + a1 a2' = s a2
    let da1 = (s * a2 - a1 * da2) / a2;
    Ok((da1, da2))
}

/// Defects of `(∗ψ)' = d̄ψ` for `ψ = ε¹, ε², ε³`.
pub fn hitchin_residuals(a1: f64, a2: f64, da1: f64, da2: f64) -> Result<[f64; 3], FlowError> {
    let jet = TwoParamJet::new(a1, a2, da1, da2);
    let r = |axis| geometry::hodge_dbar_pair(axis, &jet).map(|p| p.defect());
    Ok([r(FrameAxis::E1)?, r(FrameAxis::E2)?, r(FrameAxis::E3)?])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn ricci_round_values() {
        assert_eq!(rhs_ricci_round(1.0).unwrap(), -4.0);
        assert_eq!(rhs_ricci_round(2.0).unwrap(), -2.0);
        // f = √(8(1 - t)) at t = 0.5
        let f = (8.0_f64 * 0.5).sqrt();
        assert_abs_diff_eq!(rhs_ricci_round(f).unwrap(), -2.0, epsilon = 1e-15);
        assert!(rhs_ricci_round(0.0).is_err());
    }

    #[test]
    fn dirac_rhs() {
        assert_eq!(rhs_dirac([0.5, 1.0], CurvatureSign::Zero), [1.0, 0.0]);
        assert_eq!(rhs_dirac([0.5, 1.0], CurvatureSign::Positive), [1.0, -0.5]);
        assert_eq!(rhs_dirac([0.5, 1.0], CurvatureSign::Negative), [1.0, 0.5]);
        assert_eq!(dirac_constraint(0.0, 1.0, CurvatureSign::Positive), 0.0);
    }

    #[test]
    fn berger_values() {
        for v in [0.1, 1.0, 7.0] {
            assert_eq!(rhs_ricci_berger(v, v).unwrap(), (-8.0, -8.0));
        }
        assert_eq!(rhs_ricci_berger(0.0, 5.0).unwrap(), (0.0, -16.0));
        assert_eq!(rhs_ricci_berger(1.0, 2.0).unwrap(), (-2.0, -12.0));
        assert!(rhs_ricci_berger(1.0, 0.0).is_err());
        assert!(rhs_ricci_berger(-1.0, 1.0).is_err());
    }

    #[test]
    fn berger_matches_ricci_bar() {
        // α' = -2α Ric̄₁₁, β' = -2β Ric̄₂₂ with a1 = √α, a2 = √β
        for (alpha, beta) in [(1.0, 2.0), (4.0, 9.0), (9.0, 4.0), (0.3, 0.1)] {
            let ric = geometry::ricci_bar(f64::sqrt(alpha), f64::sqrt(beta)).unwrap();
            let (da, db) = rhs_ricci_berger(alpha, beta).unwrap();
            assert_abs_diff_eq!(da, -2.0 * alpha * ric.ric11, epsilon = 1e-12);
            assert_abs_diff_eq!(db, -2.0 * beta * ric.ric22, epsilon = 1e-12);
        }
    }

    #[test]
    fn normalized_values() {
        assert_eq!(rhs_normalized_berger(1.3, 1.3).unwrap(), (0.0, 0.0));
        assert_eq!(rhs_normalized_berger(2.0, 1.0).unwrap(), (-32.0, 8.0));
    }

    #[test]
    fn normalized_matches_ricci_bar() {
        // a_i'/a_i = -(Ric̄_ii - R̄/3)
        for (a1, a2) in [(2.0, 1.0), (0.5, 1.5), (1.1, 0.9)] {
            let ric = geometry::ricci_bar(a1, a2).unwrap();
            let mean = ric.scalar / 3.0;
            let (d1, d2) = rhs_normalized_berger(a1, a2).unwrap();
            assert_abs_diff_eq!(d1, -a1 * (ric.ric11 - mean), epsilon = 1e-12);
            assert_abs_diff_eq!(d2, -a2 * (ric.ric22 - mean), epsilon = 1e-12);
        }
    }

    #[test]
    fn asd_values() {
        assert_eq!(rhs_asd(2.5, 2.5).unwrap(), (1.0, 1.0));
        assert_eq!(rhs_asd(0.0, 1.7).unwrap(), (2.0, 0.0));
        assert_eq!(rhs_asd(1.0, 1.0).unwrap(), (1.0, 1.0));
        assert!(rhs_asd(1.0, 0.0).is_err());
    }

    #[test]
    fn flow9_values() {
        let (d1, d2) = rhs_flow9(1.0, 1.0).unwrap();
        assert_abs_diff_eq!(d1, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d2, 1.0, epsilon = 1e-15);
        let (d1, d2) = rhs_flow9(1.0, 2.0).unwrap();
        assert_abs_diff_eq!(d1, 1.75, epsilon = 1e-15);
        assert_abs_diff_eq!(d2, 0.5, epsilon = 1e-15);
        assert!(matches!(
            rhs_flow9(2.0_f64.sqrt() * 1.5, 1.5),
            Err(FlowError::DomainExit(_))
        ));
        assert!(matches!(rhs_flow9(0.0, 1.0), Err(FlowError::DomainExit(_))));
    }

    #[test]
    fn hitchin_residual_values() {
        let (a1, a2) = (0.6, 1.4);
        let (d1, d2) = rhs_asd(a1, a2).unwrap();
        assert_eq!(hitchin_residuals(a1, a2, d1, d2).unwrap(), [0.0; 3]);
        assert_eq!(hitchin_residuals(1.0, 1.0, 0.0, 0.0).unwrap(), [-2.0; 3]);
        let t = 1.9;
        assert_eq!(hitchin_residuals(t, t, 1.0, 1.0).unwrap(), [0.0; 3]);
    }

    proptest! {
        #[test]
        fn asd_is_scale_invariant(a2 in 0.1f64..10.0, ratio in 0.0f64..1.41, lambda in 0.01f64..100.0) {
            let a1 = ratio * a2;
            let (x1, x2) = rhs_asd(a1, a2).unwrap();
            let (y1, y2) = rhs_asd(lambda * a1, lambda * a2).unwrap();
            prop_assert!((x1 - y1).abs() <= 1e-12);
            prop_assert!((x2 - y2).abs() <= 1e-12);
        }

        #[test]
        fn hitchin_equals_asd(a2 in 0.1f64..10.0, ratio in 0.0f64..1.41) {
            let a1 = ratio * a2;
            let (x1, x2) = rhs_asd(a1, a2).unwrap();
            let (y1, y2) = rhs_hitchin(a1, a2).unwrap();
            prop_assert!((x1 - y1).abs() <= 1e-14);
            prop_assert!((x2 - y2).abs() <= 1e-14);
        }

        #[test]
        fn normalized_flow_preserves_volume(a1 in 0.1f64..5.0, a2 in 0.1f64..5.0) {
            let (d1, d2) = rhs_normalized_berger(a1, a2).unwrap();
            // d(a1 a2²)/dt
            let dv = d1 * a2 * a2 + 2.0 * a1 * a2 * d2;
            let scale = (d1 * a2 * a2).abs().max(1.0);
            prop_assert!(dv.abs() <= 1e-12 * scale);
        }
    }
}

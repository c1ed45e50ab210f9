//! Connection forms, curvature blocks and Ricci tensors for the warped metric
//!
//! ```text
//! g = dt² + a1(t)² (e¹)² + a2(t)² ((e²)² + (e³)²)
//! ```
//!
//! on S³ (or RP³), written in the orthonormal coframe
//! `ε⁰ = dt, ε¹ = a1 e¹, ε² = a2 e², ε³ = a2 e³`. The left-invariant coframe
//! satisfies `de¹ = 2 e²∧e³` (cyclically), i.e. the structure constant is 2.
//!
//! Conventions:
//!
//! * `ω` is the Levi-Civita connection form with `dε^i = -ω^i_j ∧ ε^j`.
//! * `Ω^i_j = dω^i_j + ω^i_k ∧ ω^k_j`.
//! * Ricci components are reported as [`FrameConvention::CURVATURE_FACTOR`]
//!   times the sum of sectional block coefficients, so the unit round sphere
//!   has `Ric = 4·δ` and the unit round S⁴ has `Ric = 6·δ`. This is twice the
//!   textbook normalization and is used consistently by every flow in the crate.
//!
//! The one-parameter (conformally round) ansatz is the special case `a1 = a2 = f`.

use std::collections::BTreeMap;

use crate::error::GeometryError;

/// Fixed constants of the Cartan frame on S³.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameConvention;

impl FrameConvention {
    /// `[ξᵢ, ξᵢ₊₁] = 2 ξᵢ₊₂`.
    pub const STRUCTURE_CONSTANT: f64 = 2.0;
    /// Factor turning a curvature-block coefficient into `R^i_{jij}`.
    pub const CURVATURE_FACTOR: f64 = 2.0;
}

/// Second derivatives of the scale functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondDerivatives {
    pub dda1: f64,
    pub dda2: f64,
}

/// Values of `(a1, a2)` and their t-derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoParamJet {
    pub a1: f64,
    pub a2: f64,
    pub da1: f64,
    pub da2: f64,
    pub second: Option<SecondDerivatives>,
}

impl TwoParamJet {
    pub fn new(a1: f64, a2: f64, da1: f64, da2: f64) -> Self {
        Self {
            a1,
            a2,
            da1,
            da2,
            second: None,
        }
    }

    pub fn with_second(mut self, dda1: f64, dda2: f64) -> Self {
        self.second = Some(SecondDerivatives { dda1, dda2 });
        self
    }

    /// Jet of the conformally round ansatz `a1 = a2 = f`.
    pub fn round(f: f64, df: f64, ddf: Option<f64>) -> Self {
        Self {
            a1: f,
            a2: f,
            da1: df,
            da2: df,
            second: ddf.map(|d| SecondDerivatives { dda1: d, dda2: d }),
        }
    }

    fn require_positive(&self) -> Result<(), GeometryError> {
        if !(self.a2 > 0.0) {
            return Err(GeometryError::domain("a2 must be positive"));
        }
        if !(self.a1 > 0.0) {
            return Err(GeometryError::domain(
                "a1 must be positive (connection form undefined at a1 = 0)",
            ));
        }
        Ok(())
    }

    fn require_second(&self) -> Result<SecondDerivatives, GeometryError> {
        self.second.ok_or(GeometryError::MissingSecondDerivatives)
    }
}

/// Signed index permutation `ε¹ → -ε¹, ε² ↔ ε³` (ε⁰ fixed).
///
/// It preserves the structure equations of the coframe, so it is an isometry of
/// the ansatz that exchanges the two equal scales. A plain 2↔3 swap reverses
/// orientation and flips the sign of the structure constants.
const SWAP_PERM: [usize; 4] = [0, 1, 3, 2];
const SWAP_SIGN: [f64; 4] = [1.0, -1.0, 1.0, 1.0];

/// Nonzero coefficients of `ω^i_j = c ε^k`, stored for `i < j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionForm {
    entries: BTreeMap<(usize, usize, usize), f64>,
}

impl ConnectionForm {
    fn from_entries(raw: impl IntoIterator<Item = ((usize, usize, usize), f64)>) -> Self {
        let mut entries = BTreeMap::new();
        for ((i, j, k), c) in raw {
            if i == j || c == 0.0 {
                continue;
            }
            let (key, val) = if i < j {
                ((i, j, k), c)
            } else {
                ((j, i, k), -c)
            };
            *entries.entry(key).or_insert(0.0) += val;
        }
        entries.retain(|_, c| *c != 0.0);
        Self { entries }
    }

    /// Coefficient of `ε^k` in `ω^i_j`, for any ordering of `i, j`.
    pub fn coeff(&self, i: usize, j: usize, k: usize) -> f64 {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => 0.0,
            std::cmp::Ordering::Less => self.entries.get(&(i, j, k)).copied().unwrap_or(0.0),
            std::cmp::Ordering::Greater => -self.entries.get(&(j, i, k)).copied().unwrap_or(0.0),
        }
    }

    /// Stored `(i, j, k) → c` entries with `i < j`.
    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize, usize), f64)> + '_ {
        self.entries.iter().map(|(k, v)| (*k, *v))
    }

    /// Image under the 2↔3 isometry of the ansatz.
    pub fn swap_23(&self) -> Self {
        Self::from_entries(self.entries.iter().map(|(&(i, j, k), &c)| {
            let sign = SWAP_SIGN[i] * SWAP_SIGN[j] * SWAP_SIGN[k];
            ((SWAP_PERM[i], SWAP_PERM[j], SWAP_PERM[k]), sign * c)
        }))
    }
}

fn ordered(i: usize, j: usize) -> ((usize, usize), f64) {
    if i < j {
        ((i, j), 1.0)
    } else {
        ((j, i), -1.0)
    }
}

/// One term `c · ε^k ∧ ε^l` with `k < l`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockTerm {
    pub k: usize,
    pub l: usize,
    pub coeff: f64,
}

/// The curvature 2-forms `Ω^i_j` for `i < j`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureBlocks {
    blocks: BTreeMap<(usize, usize), Vec<BlockTerm>>,
}

impl CurvatureBlocks {
    fn from_terms(raw: impl IntoIterator<Item = (usize, usize, usize, usize, f64)>) -> Self {
        let mut acc: BTreeMap<(usize, usize), BTreeMap<(usize, usize), f64>> = BTreeMap::new();
        for i in 0..4 {
            for j in i + 1..4 {
                acc.insert((i, j), BTreeMap::new());
            }
        }
        for (i, j, k, l, c) in raw {
            if i == j || k == l {
                continue;
            }
            let (block, s1) = ordered(i, j);
            let (form, s2) = ordered(k, l);
            *acc.entry(block).or_default().entry(form).or_insert(0.0) += s1 * s2 * c;
        }
        let blocks = acc
            .into_iter()
            .map(|(key, terms)| {
                let terms = terms
                    .into_iter()
                    .filter(|(_, c)| *c != 0.0)
                    .map(|((k, l), coeff)| BlockTerm { k, l, coeff })
                    .collect();
                (key, terms)
            })
            .collect();
        Self { blocks }
    }

    /// Coefficient of `ε^k ∧ ε^l` in `Ω^i_j`, antisymmetric in both index pairs.
    pub fn coeff(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        if i == j || k == l {
            return 0.0;
        }
        let (key, s1) = ordered(i, j);
        let ((fk, fl), s2) = ordered(k, l);
        self.blocks
            .get(&key)
            .and_then(|terms| terms.iter().find(|t| t.k == fk && t.l == fl))
            .map_or(0.0, |t| s1 * s2 * t.coeff)
    }

    /// Terms of the block `Ω^i_j` (`i < j`), or `None` for an unknown index pair.
    pub fn block(&self, i: usize, j: usize) -> Option<&[BlockTerm]> {
        self.blocks.get(&(i, j)).map(Vec::as_slice)
    }

    pub fn keys(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.blocks.keys().copied()
    }

    /// Sectional coefficient of the 2-plane `(i, j)`, i.e. the `ε^i∧ε^j` term of `Ω^i_j`.
    pub fn sectional(&self, i: usize, j: usize) -> f64 {
        self.coeff(i, j, i, j)
    }

    /// Image under the 2↔3 isometry of the ansatz.
    pub fn swap_23(&self) -> Self {
        Self::from_terms(self.blocks.iter().flat_map(|(&(i, j), terms)| {
            terms.iter().map(move |t| {
                let sign = SWAP_SIGN[i] * SWAP_SIGN[j] * SWAP_SIGN[t.k] * SWAP_SIGN[t.l];
                (
                    SWAP_PERM[i],
                    SWAP_PERM[j],
                    SWAP_PERM[t.k],
                    SWAP_PERM[t.l],
                    sign * t.coeff,
                )
            })
        }))
    }

    /// Largest coefficient magnitude over all blocks.
    pub fn max_abs(&self) -> f64 {
        self.blocks
            .values()
            .flatten()
            .fold(0.0_f64, |m, t| m.max(t.coeff.abs()))
    }
}

/// Diagonal Ricci components in the orthonormal frame.
///
/// `ric00` is `None` for the restricted (three-dimensional) tensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RicciDiagnostics {
    pub ric00: Option<f64>,
    pub ric11: f64,
    pub ric22: f64,
    pub ric33: f64,
    pub scalar: f64,
    pub is_ambient: bool,
}

impl RicciDiagnostics {
    /// Diagonal entries in frame order; for the restricted tensor only indices 1..=3.
    pub fn diagonal(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(4);
        if let Some(r) = self.ric00 {
            out.push(r);
        }
        out.extend([self.ric11, self.ric22, self.ric33]);
        out
    }
}

/// Anti-self-duality defects of the connection form.
///
/// `rho1` is the ε¹-coefficient of `-(ω⁰₁ + ω²₃)` and `rho2` the ε²-coefficient
/// of `-(ω⁰₂ - ω¹₃)`. Both vanish exactly for anti-self-dual metrics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsdResidual {
    pub rho1: f64,
    pub rho2: f64,
}

impl AsdResidual {
    pub fn max_abs(&self) -> f64 {
        self.rho1.abs().max(self.rho2.abs())
    }
}

/// One of the three orthonormal 1-forms on the sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameAxis {
    E1,
    E2,
    E3,
}

impl TryFrom<u8> for FrameAxis {
    type Error = GeometryError;

    fn try_from(value: u8) -> Result<Self, Self::Error> {
        match value {
            1 => Ok(Self::E1),
            2 => Ok(Self::E2),
            3 => Ok(Self::E3),
            other => Err(GeometryError::domain(format!(
                "frame index must be 1, 2 or 3, got {other}"
            ))),
        }
    }
}

/// Levi-Civita connection form of the jet's metric.
pub fn connection_form(jet: &TwoParamJet) -> Result<ConnectionForm, GeometryError> {
    jet.require_positive()?;
    let TwoParamJet {
        a1, a2, da1, da2, ..
    } = *jet;
    let a2sq = a2 * a2;
    let tangential = a1 / a2sq;
    Ok(ConnectionForm::from_entries([
        ((0, 1, 1), -da1 / a1),
        ((0, 2, 2), -da2 / a2),
        ((0, 3, 3), -da2 / a2),
        ((1, 2, 3), tangential),
        ((1, 3, 2), -tangential),
        ((2, 3, 1), -(a1 * a1 - 2.0 * a2sq) / (a1 * a2sq)),
    ]))
}

/// Curvature blocks of the four-dimensional metric.
pub fn curvature_blocks(jet: &TwoParamJet) -> Result<CurvatureBlocks, GeometryError> {
    jet.require_positive()?;
    let dd = jet.require_second()?;
    let TwoParamJet {
        a1, a2, da1, da2, ..
    } = *jet;
    let a2sq = a2 * a2;
    let a2_4 = a2sq * a2sq;
    // mixed term shared by the off-diagonal parts of Ω⁰ᵢ and Ω¹ⱼ
    let mixed = da1 / a2sq - a1 * da2 / (a2sq * a2);
    let fiber_sec = a1 * a1 / a2_4 - da1 * da2 / (a1 * a2);
    let base_sec = 4.0 / a2sq - 3.0 * a1 * a1 / a2_4 - da2 * da2 / a2sq;
    Ok(CurvatureBlocks::from_terms([
        (0, 1, 0, 1, -dd.dda1 / a1),
        (0, 1, 2, 3, -2.0 * mixed),
        (0, 2, 0, 2, -dd.dda2 / a2),
        (0, 2, 3, 1, mixed),
        (0, 3, 0, 3, -dd.dda2 / a2),
        (0, 3, 1, 2, mixed),
        (1, 2, 0, 3, mixed),
        (1, 2, 1, 2, fiber_sec),
        (1, 3, 0, 2, -mixed),
        (1, 3, 1, 3, fiber_sec),
        (2, 3, 0, 1, -2.0 * mixed),
        (2, 3, 2, 3, base_sec),
    ]))
}

/// Intrinsic curvature blocks of the three-metric `ḡ` (indices 1..=3 only).
pub fn restricted_curvature_blocks(a1: f64, a2: f64) -> Result<CurvatureBlocks, GeometryError> {
    if !(a2 > 0.0) {
        return Err(GeometryError::domain("a2 must be positive"));
    }
    if !(a1 >= 0.0) {
        return Err(GeometryError::domain("a1 must be non-negative"));
    }
    let a2sq = a2 * a2;
    let a2_4 = a2sq * a2sq;
    let fiber_sec = a1 * a1 / a2_4;
    Ok(CurvatureBlocks::from_terms([
        (1, 2, 1, 2, fiber_sec),
        (1, 3, 1, 3, fiber_sec),
        (2, 3, 2, 3, 4.0 / a2sq - 3.0 * a1 * a1 / a2_4),
    ]))
}

/// Ricci tensor of the restricted metric `ḡ = a1²(e¹)² + a2²((e²)² + (e³)²)`.
pub fn ricci_bar(a1: f64, a2: f64) -> Result<RicciDiagnostics, GeometryError> {
    if !(a2 > 0.0) {
        return Err(GeometryError::domain("a2 must be positive"));
    }
    if !(a1 >= 0.0) {
        return Err(GeometryError::domain("a1 must be non-negative"));
    }
    let q = a1 * a1 / (a2 * a2);
    let ric11 = 4.0 * q / (a2 * a2);
    let ric22 = 4.0 / (a2 * a2) * (2.0 - q);
    Ok(RicciDiagnostics {
        ric00: None,
        ric11,
        ric22,
        ric33: ric22,
        scalar: ric11 + 2.0 * ric22,
        is_ambient: false,
    })
}

/// Ricci tensor of the four-dimensional metric, assembled from the sectional
/// coefficients of [`curvature_blocks`]. Off-diagonal components vanish for
/// this ansatz and are not reported.
pub fn ricci_ambient(jet: &TwoParamJet) -> Result<RicciDiagnostics, GeometryError> {
    let blocks = curvature_blocks(jet)?;
    let c = FrameConvention::CURVATURE_FACTOR;
    let ric = |i: usize| -> f64 {
        (0..4)
            .filter(|&j| j != i)
            .map(|j| blocks.sectional(i, j))
            .sum::<f64>()
            * c
    };
    let (r0, r1, r2, r3) = (ric(0), ric(1), ric(2), ric(3));
    Ok(RicciDiagnostics {
        ric00: Some(r0),
        ric11: r1,
        ric22: r2,
        ric33: r3,
        scalar: r0 + r1 + r2 + r3,
        is_ambient: true,
    })
}

/// Closed-form ambient Ricci tensor of the conformally round metric `dt² + f² g_S³`.
pub fn ricci_ambient_round(f: f64, df: f64, ddf: f64) -> Result<RicciDiagnostics, GeometryError> {
    if !(f > 0.0) {
        return Err(GeometryError::domain("f must be positive"));
    }
    let ric00 = -6.0 * ddf / f;
    let ric11 = (4.0 - 4.0 * df * df - 2.0 * ddf * f) / (f * f);
    Ok(RicciDiagnostics {
        ric00: Some(ric00),
        ric11,
        ric22: ric11,
        ric33: ric11,
        scalar: 3.0 / (f * f) * (4.0 - 4.0 * df * df - 4.0 * ddf * f),
        is_ambient: true,
    })
}

/// Second fundamental form of the round sphere of radius `τ` in flat ℝ⁴.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundSecondFundamental {
    /// Diagonal value of `b_jk` in the orthonormal frame: `-1/τ`.
    pub orthonormal: f64,
    /// Diagonal value of `b_jk` in the invariant `e`-basis: `-τ`.
    pub coframe: f64,
    /// Diagonal of `∂τ ḡ` in the `e`-basis: `2τ`, equal to `-2 b`.
    pub metric_rate_coframe: f64,
}

pub fn second_fundamental_round(tau: f64) -> Result<RoundSecondFundamental, GeometryError> {
    if !(tau > 0.0) {
        return Err(GeometryError::domain("radius must be positive"));
    }
    // b_jk = ω⁰_j(ξ_k / τ) read off the flat cone's connection form
    let cone = connection_form(&TwoParamJet::round(tau, 1.0, None))?;
    let orthonormal = cone.coeff(0, 1, 1);
    Ok(RoundSecondFundamental {
        orthonormal,
        coframe: orthonormal * tau * tau,
        metric_rate_coframe: 2.0 * tau,
    })
}

/// ASD residuals `(rho1, rho2)`, read from the connection form.
pub fn asd_residual(jet: &TwoParamJet) -> Result<AsdResidual, GeometryError> {
    let omega = connection_form(jet)?;
    Ok(AsdResidual {
        rho1: -(omega.coeff(0, 1, 1) + omega.coeff(2, 3, 1)),
        rho2: -(omega.coeff(0, 2, 2) - omega.coeff(1, 3, 2)),
    })
}

/// Coefficient of `ε¹∧ε²∧ε³` in `ψ ∧ d̄ψ` for `ψ = ε^index`.
pub fn contact_pairing(axis: FrameAxis, a1: f64, a2: f64) -> Result<f64, GeometryError> {
    if !(a2 > 0.0) {
        return Err(GeometryError::domain("a2 must be positive"));
    }
    if !(a1 > 0.0) {
        return Err(GeometryError::domain(
            "a1 must be positive (contact condition degenerates at a1 = 0)",
        ));
    }
    let s = FrameConvention::STRUCTURE_CONSTANT;
    Ok(match axis {
        FrameAxis::E1 => s * a1 / (a2 * a2),
        FrameAxis::E2 | FrameAxis::E3 => s / a1,
    })
}

/// Both sides of `(∗ψ)' = d̄ψ` for `ψ = ε^index`, as coefficients on the
/// invariant 2-form `e^j∧e^k` complementary to the axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HodgeDbarPair {
    /// `d/dt` of the coefficient of `∗ψ`.
    pub star_rate: f64,
    /// Coefficient of `d̄ψ`.
    pub dbar: f64,
}

impl HodgeDbarPair {
    pub fn defect(&self) -> f64 {
        self.star_rate - self.dbar
    }
}

pub fn hodge_dbar_pair(axis: FrameAxis, jet: &TwoParamJet) -> Result<HodgeDbarPair, GeometryError> {
    if !(jet.a1 > 0.0 && jet.a2 > 0.0) {
        return Err(GeometryError::domain("a1 and a2 must be positive"));
    }
    let s = FrameConvention::STRUCTURE_CONSTANT;
    let TwoParamJet {
        a1, a2, da1, da2, ..
    } = *jet;
    Ok(match axis {
        // ∗ε¹ = a2² e²∧e³, d̄ε¹ = 2 a1 e²∧e³
        FrameAxis::E1 => HodgeDbarPair {
            star_rate: 2.0 * a2 * da2,
            dbar: s * a1,
        },
        // ∗ε² = a1 a2 e³∧e¹, d̄ε² = 2 a2 e³∧e¹
        FrameAxis::E2 | FrameAxis::E3 => HodgeDbarPair {
            star_rate: a1.mul_add(da2, da1 * a2),
            dbar: s * a2,
        },
    })
}

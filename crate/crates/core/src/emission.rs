//! Dipole emission patterns, aperture collection, polarization-channel
//! balance, cross-talk infidelity and temporal mode overlap.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::{integrate_2d, NumericError};
use crate::protocols::{run_protocol, ProtocolConfig, ProtocolError, ProtocolKind};
use crate::tolerances;
use crate::trap::{ApertureSpec, TrapError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EmissionError {
    #[error("direction must be a non-zero finite vector")]
    ZeroDirection,
    #[error("quantization axis must be a unit vector (norm {0})")]
    AxisNotUnit(f64),
    #[error("branching weights must be non-negative and sum to 1 (got {0})")]
    BadWeights(f64),
    #[error("cross-talk must be at most 0 dB (got {0} dB)")]
    PositiveCrosstalk(f64),
    #[error("lifetime must be positive (got {0})")]
    BadLifetime(f64),
    #[error("cross-talk budgets are computed for the polarization protocol")]
    NotPolarization,
    #[error(transparent)]
    Trap(#[from] TrapError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DipoleKind {
    /// Δm = 0.
    Pi,
    /// Δm = ±1 (both signs share the pattern).
    Sigma,
    /// Uniform reference pattern `1/4π`.
    Isotropic,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DipoleTransition {
    pub kind: DipoleKind,
    pub axis: [f64; 3],
}

impl DipoleTransition {
    /// Quantization axis in the trap plane, across the RF gap.
    pub const DEFAULT_AXIS: [f64; 3] = [0.0, 1.0, 0.0];

    pub fn new(kind: DipoleKind) -> Self {
        Self { kind, axis: Self::DEFAULT_AXIS }
    }

    pub fn with_axis(kind: DipoleKind, axis: [f64; 3]) -> Result<Self, EmissionError> {
        let n = norm(axis);
        if (n - 1.0).abs() > tolerances::HERMITIAN {
            return Err(EmissionError::AxisNotUnit(n));
        }
        Ok(Self { kind, axis })
    }
}

fn norm(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Emitted power per steradian along `direction` (need not be normalized),
/// normalized to unit total.
pub fn dipole_intensity(t: &DipoleTransition, direction: [f64; 3]) -> Result<f64, EmissionError> {
    let n = norm(direction);
    if !(n > 0.0 && n.is_finite()) {
        return Err(EmissionError::ZeroDirection);
    }
    let c = (direction[0] * t.axis[0] + direction[1] * t.axis[1] + direction[2] * t.axis[2]) / n;
    Ok(intensity_cos(t.kind, c))
}

fn intensity_cos(kind: DipoleKind, cos_theta: f64) -> f64 {
    let c2 = cos_theta * cos_theta;
    match kind {
        DipoleKind::Pi => 3.0 / (8.0 * PI) * (1.0 - c2),
        DipoleKind::Sigma => 3.0 / (16.0 * PI) * (1.0 + c2),
        DipoleKind::Isotropic => 1.0 / (4.0 * PI),
    }
}

/// Fraction of the emitted power crossing a centered rectangular aperture
/// in the plane a height `h` below the ion.
///
/// Integrates in the angles `u = atan(x/h)`, `v = atan(y/h)`, where
/// `dΩ = sec²u sec²v / (1 + tan²u + tan²v)^{3/2} du dv`; infinite extents
/// map to `±π/2`.
pub fn collected_fraction(t: &DipoleTransition, ap: &ApertureSpec) -> Result<f64, EmissionError> {
    ap.validate()?;
    if ap.length == 0.0 || ap.width == 0.0 {
        return Ok(0.0);
    }
    let u_max = (ap.length / (2.0 * ap.height)).atan();
    let v_max = (ap.width / (2.0 * ap.height)).atan();
    let axis = t.axis;
    let f = |u: f64, v: f64| {
        let (tu, tv) = (u.tan(), v.tan());
        let q = 1.0 + tu * tu + tv * tv;
        let jac = (1.0 + tu * tu) * (1.0 + tv * tv) / q.powf(1.5);
        let c = (tu * axis[0] + tv * axis[1] - axis[2]) / q.sqrt();
        intensity_cos(t.kind, c) * jac
    };
    Ok(integrate_2d(f, (-u_max, u_max), (-v_max, v_max), tolerances::QUADRATURE_REL)?)
}

/// Integral of the pattern over the full sphere; 1 for every kind.
pub fn total_emission(t: &DipoleTransition) -> Result<f64, EmissionError> {
    let axis = t.axis;
    let f = |theta: f64, phi: f64| {
        let (s, c) = theta.sin_cos();
        let d = [s * phi.cos(), s * phi.sin(), c];
        let cos = d[0] * axis[0] + d[1] * axis[1] + d[2] * axis[2];
        intensity_cos(t.kind, cos) * s
    };
    Ok(integrate_2d(f, (0.0, PI), (0.0, 2.0 * PI), 1e-10)?)
}

/// A collection path: one transition, its branching weight and aperture.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollectionChannel {
    pub transition: DipoleTransition,
    pub aperture: ApertureSpec,
    pub weight: f64,
}

impl CollectionChannel {
    /// Photon probability delivered into this channel's waveguide.
    pub fn probability(&self) -> Result<f64, EmissionError> {
        if self.weight == 0.0 {
            return Ok(0.0);
        }
        Ok(self.weight * collected_fraction(&self.transition, &self.aperture)?)
    }
}

/// Per-waveguide photon probabilities `(p_π, p_σ)` for a J=½ → J=½ decay
/// with branching weights `pi_weight` and `sigma_weight` into one aperture.
pub fn channel_balance(pi_weight: f64, sigma_weight: f64, ap: &ApertureSpec) -> Result<(f64, f64), EmissionError> {
    let sum = pi_weight + sigma_weight;
    if pi_weight < 0.0 || sigma_weight < 0.0 || (sum - 1.0).abs() > tolerances::NORMALIZED_INPUT {
        return Err(EmissionError::BadWeights(sum));
    }
    let ch = |kind, weight| CollectionChannel { transition: DipoleTransition::new(kind), aperture: *ap, weight };
    Ok((ch(DipoleKind::Pi, pi_weight).probability()?, ch(DipoleKind::Sigma, sigma_weight).probability()?))
}

/// Converts power cross-talk in dB to the leakage amplitude χ.
pub fn crosstalk_amplitude(db: f64) -> f64 {
    if db == f64::NEG_INFINITY {
        0.0
    } else {
        10f64.powf(db / 20.0)
    }
}

/// Excess infidelity of the dominant polarization herald caused by TE1 →
/// TE0 leakage of `db` (power, dB) in the mode converter.
pub fn crosstalk_infidelity(config: &ProtocolConfig, db: f64) -> Result<f64, EmissionError> {
    if config.kind != ProtocolKind::Polarization {
        return Err(EmissionError::NotPolarization);
    }
    if db > 0.0 || db.is_nan() {
        return Err(EmissionError::PositiveCrosstalk(db));
    }
    let fid = |chi: f64| -> Result<f64, EmissionError> {
        let cfg = ProtocolConfig { crosstalk: chi, ..config.clone() };
        Ok(run_protocol(&cfg)?.dominant().and_then(|e| e.fidelity).unwrap_or(0.0))
    };
    Ok(fid(0.0)? - fid(crosstalk_amplitude(db))?)
}

/// Overlap `e^{−|Δt|/τ}` of two exponential wavepackets offset by `Δt`.
pub fn temporal_overlap(dt: f64, tau: f64) -> Result<f64, EmissionError> {
    if !(tau > 0.0) {
        return Err(EmissionError::BadLifetime(tau));
    }
    Ok((-dt.abs() / tau).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trap::solid_angle_fraction;

    #[test]
    fn pattern_values() {
        let pi = DipoleTransition::new(DipoleKind::Pi);
        let sigma = DipoleTransition::new(DipoleKind::Sigma);
        assert!((dipole_intensity(&pi, [0.0, 0.0, -1.0]).unwrap() - 3.0 / (8.0 * PI)).abs() < 1e-15);
        assert_eq!(dipole_intensity(&pi, [0.0, 2.0, 0.0]).unwrap(), 0.0);
        assert!((dipole_intensity(&sigma, [0.0, 1.0, 0.0]).unwrap() - 3.0 / (8.0 * PI)).abs() < 1e-15);
        assert_eq!(dipole_intensity(&pi, [0.0; 3]), Err(EmissionError::ZeroDirection));
    }

    #[test]
    fn patterns_are_normalized() {
        for k in [DipoleKind::Pi, DipoleKind::Sigma, DipoleKind::Isotropic] {
            let t = DipoleTransition::with_axis(k, [0.6, 0.0, 0.8]).unwrap();
            assert!((total_emission(&t).unwrap() - 1.0).abs() < 1e-9, "{k:?}");
        }
    }

    #[test]
    fn half_space_collects_half() {
        let plane = ApertureSpec::new(f64::INFINITY, f64::INFINITY, 50.0);
        for k in [DipoleKind::Pi, DipoleKind::Sigma, DipoleKind::Isotropic] {
            let f = collected_fraction(&DipoleTransition::new(k), &plane).unwrap();
            assert!((f - 0.5).abs() < 1e-6, "{k:?} {f}");
        }
    }

    #[test]
    fn isotropic_matches_closed_form() {
        let ap = ApertureSpec::new(100.0, 62.0, 50.0);
        let iso = collected_fraction(&DipoleTransition::new(DipoleKind::Isotropic), &ap).unwrap();
        assert!((iso - solid_angle_fraction(&ap).unwrap()).abs() < 1e-7);
    }

    #[test]
    fn small_aperture_ratio_is_two() {
        // Exposure 1e-3: a square of side s with (s/h)²/4π ≈ 1e-3.
        let h = 50.0;
        let s = h * (4.0 * PI * 1e-3f64).sqrt();
        let ap = ApertureSpec::new(s, s, h);
        let pi = collected_fraction(&DipoleTransition::new(DipoleKind::Pi), &ap).unwrap();
        let sigma = collected_fraction(&DipoleTransition::new(DipoleKind::Sigma), &ap).unwrap();
        assert!((pi / sigma - 2.0).abs() < 0.02);
        let (p_pi, p_sigma) = channel_balance(1.0 / 3.0, 2.0 / 3.0, &ap).unwrap();
        assert!((p_pi / p_sigma - 1.0).abs() < 0.02);
    }

    #[test]
    fn balance_edge_cases() {
        let ap = ApertureSpec::new(100.0, 62.0, 50.0);
        assert_eq!(channel_balance(1.0, 0.0, &ap).unwrap().1, 0.0);
        // Reference from an independent Cartesian double integral.
        let (p, s) = channel_balance(1.0 / 3.0, 2.0 / 3.0, &ap).unwrap();
        assert!((p / s - 0.851629).abs() < 1e-5);
        assert!(matches!(channel_balance(0.5, 0.6, &ap), Err(EmissionError::BadWeights(_))));
    }

    #[test]
    fn overlap_values() {
        assert_eq!(temporal_overlap(0.0, 8e-9).unwrap(), 1.0);
        assert!((temporal_overlap(8e-9, 8e-9).unwrap() - (-1f64).exp()).abs() < 1e-15);
        assert!(temporal_overlap(1.0, 8e-9).unwrap() < 1e-300);
        assert!(temporal_overlap(1.0, 0.0).is_err());
    }

    #[test]
    fn crosstalk_limits() {
        let c = ProtocolConfig::ideal(ProtocolKind::Polarization).with_symmetric(1.0, 1.0, 0.01);
        assert!(crosstalk_infidelity(&c, f64::NEG_INFINITY).unwrap().abs() < 1e-10);
        assert!(crosstalk_infidelity(&c, -22.0).unwrap() < 0.01);
        assert!(crosstalk_infidelity(&c, 1.0).is_err());
        let n = ProtocolConfig::ideal(ProtocolKind::Number);
        assert_eq!(crosstalk_infidelity(&n, -10.0), Err(EmissionError::NotPolarization));
    }
}

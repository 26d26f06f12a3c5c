//! Grating-coupler and coupler design helpers: grating-equation pitch,
//! constant-optical-path chirped tooth placement, a fabrication-floor lint
//! and adiabatic coupler length scaling.
//!
//! In-plane positions are in micrometres and pitches in nanometres. The
//! collection waveguide leaves the grating towards `+x`, so emission angles
//! are positive on the far side of the ion.
//!
//! For normal emission directly beneath the ion the first-order grating
//! equation gives `Λ = λ0/n_eff`, the guided wavelength. A pitch of
//! `Λ = λ/2` is also quoted for that point; the factor of two is left
//! unresolved and this module follows the grating equation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::{find_root, integrate, NumericError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GratingError {
    #[error("effective index must exceed 1 (got {0})")]
    IndexTooLow(f64),
    #[error("no propagating order {order} at angle {angle_deg}°")]
    Evanescent { angle_deg: f64, order: u32 },
    #[error("{0} must be positive")]
    NonPositive(&'static str),
    #[error("span [{0}, {1}] is empty")]
    EmptySpan(f64, f64),
    #[error("no grating teeth fall inside the span")]
    NoTeeth,
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GratingSpec {
    /// Free-space wavelength λ0 (nm).
    pub wavelength_nm: f64,
    /// Effective index of the grating region.
    pub n_eff: f64,
    /// Ion position along the grating (µm).
    pub ion_x: f64,
    /// Vertical ion-to-grating distance H (µm).
    pub ion_height: f64,
    /// Grating extent along x (µm).
    pub span: (f64, f64),
    /// Smallest fabricable pitch (nm).
    pub min_pitch_nm: f64,
    /// Diffraction order.
    pub order: u32,
}

impl GratingSpec {
    pub fn new(wavelength_nm: f64, n_eff: f64, ion_height: f64, span: (f64, f64)) -> Self {
        Self { wavelength_nm, n_eff, ion_x: 0.0, ion_height, span, min_pitch_nm: 240.0, order: 1 }
    }

    pub fn validate(&self) -> Result<(), GratingError> {
        if !(self.n_eff > 1.0) {
            return Err(GratingError::IndexTooLow(self.n_eff));
        }
        if !(self.wavelength_nm > 0.0) {
            return Err(GratingError::NonPositive("wavelength"));
        }
        if !(self.ion_height > 0.0) {
            return Err(GratingError::NonPositive("ion height"));
        }
        if !(self.min_pitch_nm > 0.0) {
            return Err(GratingError::NonPositive("minimum pitch"));
        }
        if self.order == 0 {
            return Err(GratingError::NonPositive("diffraction order"));
        }
        if !(self.span.1 > self.span.0) {
            return Err(GratingError::EmptySpan(self.span.0, self.span.1));
        }
        Ok(())
    }

    fn wavelength_um(&self) -> f64 {
        self.wavelength_nm * 1e-3
    }

    fn distance(&self, x: f64) -> f64 {
        (x - self.ion_x).hypot(self.ion_height)
    }

    /// Emission angle from the normal seen from a point `x` on the grating.
    pub fn angle_at(&self, x: f64) -> f64 {
        ((x - self.ion_x) / self.ion_height).atan()
    }
}

/// Grating pitch `Λ = m·λ0 / (n_eff − sin θ)` (nm) that diffracts order `m`
/// at angle `θ` from the normal; positive angles point along the guided
/// direction.
pub fn pitch_for_angle(spec: &GratingSpec, theta: f64, order: u32) -> Result<f64, GratingError> {
    if !(spec.n_eff > 1.0) {
        return Err(GratingError::IndexTooLow(spec.n_eff));
    }
    let denom = spec.n_eff - theta.sin();
    if theta.abs() >= std::f64::consts::FRAC_PI_2 || order == 0 || denom <= 0.0 {
        return Err(GratingError::Evanescent { angle_deg: theta.to_degrees(), order });
    }
    Ok(order as f64 * spec.wavelength_nm / denom)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tooth {
    /// Order index `m` of the constant-path condition.
    pub index: i64,
    pub x_um: f64,
    /// Distance to the next tooth (nm); the last tooth repeats the
    /// previous value.
    pub pitch_nm: f64,
    /// Emission angle at the pitch midpoint (degrees).
    pub angle_deg: f64,
    pub fabricable: bool,
}

/// Places teeth where the optical path from the ion to the waveguide
/// output changes by whole wavelengths:
/// `d_m − n_eff·x_m = C − m·λ0`, `d_m = √((x_m − x_ion)² + H²)`.
///
/// `C` puts the two teeth straddling the ion half a guided wavelength on
/// either side of it.
pub fn tooth_positions(spec: &GratingSpec) -> Result<Vec<Tooth>, GratingError> {
    let n = spec.n_eff;
    tooth_positions_with(spec, |_| n, |x| n * (x - spec.ion_x))
}

/// As [`tooth_positions`] with a position-dependent effective index.
pub fn tooth_positions_with_index(spec: &GratingSpec, n_eff: impl Fn(f64) -> f64) -> Result<Vec<Tooth>, GratingError> {
    let mut failure = None;
    let teeth = tooth_positions_with(spec, &n_eff, |x| {
        integrate(&n_eff, spec.ion_x, x, 1e-13, 1e-15).unwrap_or_else(|e| {
            failure.get_or_insert(e);
            f64::NAN
        })
    });
    match failure {
        Some(e) => Err(e.into()),
        None => teeth,
    }
}

fn tooth_positions_with(
    spec: &GratingSpec,
    n_eff: impl Fn(f64) -> f64,
    mut guided_path: impl FnMut(f64) -> f64,
) -> Result<Vec<Tooth>, GratingError> {
    spec.validate()?;
    let lam = spec.wavelength_um() * spec.order as f64;
    let mut g = |x: f64| spec.distance(x) - guided_path(x);
    let x0 = spec.ion_x - 0.5 * lam / n_eff(spec.ion_x);
    let c = g(x0);
    let (lo, hi) = spec.span;
    // g decreases strictly, so the order index grows with x.
    let m_lo = ((c - g(lo)) / lam - 1e-12).ceil() as i64;
    let m_hi = ((c - g(hi)) / lam + 1e-12).floor() as i64;
    if m_hi < m_lo {
        return Err(GratingError::NoTeeth);
    }
    let mut xs = Vec::with_capacity((m_hi - m_lo + 1) as usize);
    for m in m_lo..=m_hi {
        let target = c - m as f64 * lam;
        let x = find_root(|x| g(x) - target, lo, hi, 1e-10)?;
        xs.push((m, x));
    }
    let teeth = xs
        .iter()
        .enumerate()
        .map(|(i, &(m, x))| {
            let (a, b) = if i + 1 < xs.len() {
                (x, xs[i + 1].1)
            } else if i > 0 {
                (xs[i - 1].1, x)
            } else {
                (x, x)
            };
            let pitch_nm = if b > a {
                (b - a) * 1e3
            } else {
                let nl = n_eff(x);
                spec.order as f64 * spec.wavelength_nm / (nl - spec.angle_at(x).sin())
            };
            Tooth {
                index: m,
                x_um: x,
                pitch_nm,
                angle_deg: spec.angle_at(0.5 * (a + b)).to_degrees(),
                fabricable: pitch_nm >= spec.min_pitch_nm,
            }
        })
        .collect();
    Ok(teeth)
}

/// `|d_m − P(x_m) − (C − m·λ0)|` for each tooth (µm), where `C` is
/// recovered from the first tooth; `P` is the guided optical path.
pub fn path_residuals(spec: &GratingSpec, teeth: &[Tooth]) -> Vec<f64> {
    let lam = spec.wavelength_um() * spec.order as f64;
    let g = |x: f64| spec.distance(x) - spec.n_eff * (x - spec.ion_x);
    let x0 = spec.ion_x - 0.5 * spec.wavelength_um() / spec.n_eff;
    let c = g(x0);
    teeth.iter().map(|t| (g(t.x_um) - (c - t.index as f64 * lam)).abs()).collect()
}

/// A pitch below the fabrication floor between teeth `index` and the next.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PitchViolation {
    pub index: i64,
    pub x_um: f64,
    pub pitch_nm: f64,
}

/// Every adjacent tooth pair whose spacing is below `min_pitch_nm`.
pub fn fabrication_lint(teeth: &[Tooth], min_pitch_nm: f64) -> Vec<PitchViolation> {
    teeth
        .windows(2)
        .filter_map(|w| {
            let pitch_nm = (w[1].x_um - w[0].x_um) * 1e3;
            (pitch_nm < min_pitch_nm).then_some(PitchViolation { index: w[0].index, x_um: w[0].x_um, pitch_nm })
        })
        .collect()
}

/// Adiabatic coupler length for a target scattering loss, from
/// `L ∝ √(1/δ)`.
pub fn adiabatic_length_scale(delta_ref: f64, length_ref: f64, delta_target: f64) -> Result<f64, GratingError> {
    if !(delta_ref > 0.0) || !(delta_target > 0.0) {
        return Err(GratingError::NonPositive("loss δ"));
    }
    if !(length_ref > 0.0) {
        return Err(GratingError::NonPositive("reference length"));
    }
    Ok(length_ref * (delta_ref / delta_target).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(h: f64, span: (f64, f64)) -> GratingSpec {
        GratingSpec::new(493.0, 1.6, h, span)
    }

    #[test]
    fn grating_equation_pitches() {
        let s = spec(50.0, (-10.0, 10.0));
        let deg = |d: f64| d.to_radians();
        assert!((pitch_for_angle(&s, 0.0, 1).unwrap() - 308.125).abs() < 1e-9);
        assert!((pitch_for_angle(&s, deg(30.0), 1).unwrap() - 493.0 / 1.1).abs() < 1e-9);
        assert!((pitch_for_angle(&s, deg(-30.0), 1).unwrap() - 493.0 / 2.1).abs() < 1e-9);
        assert!(pitch_for_angle(&s, deg(90.0), 1).is_err());
    }

    #[test]
    fn teeth_satisfy_constant_path() {
        let s = spec(50.0, (-40.0, 40.0));
        let teeth = tooth_positions(&s).unwrap();
        assert!(teeth.len() > 200);
        for r in path_residuals(&s, &teeth) {
            assert!(r <= 1e-6 * s.wavelength_um());
        }
    }

    #[test]
    fn pitch_below_ion_matches_normal_emission() {
        let s = spec(50.0, (-5.0, 5.0));
        let teeth = tooth_positions(&s).unwrap();
        let t = teeth.iter().find(|t| t.x_um < 0.0 && t.x_um + t.pitch_nm * 1e-3 > 0.0).unwrap();
        assert!((t.pitch_nm - 308.125).abs() < 0.5);
    }

    #[test]
    fn pitch_grows_on_forward_side() {
        let s = spec(20.0, (0.0, 40.0));
        let teeth = tooth_positions(&s).unwrap();
        let inner = &teeth[..teeth.len() - 1];
        assert!(inner.windows(2).all(|w| w[1].pitch_nm > w[0].pitch_nm));
    }

    #[test]
    fn local_pitch_follows_grating_equation() {
        let s = spec(30.0, (-30.0, 30.0));
        for t in tooth_positions(&s).unwrap() {
            let want = pitch_for_angle(&s, t.angle_deg.to_radians(), 1).unwrap();
            assert!((t.pitch_nm - want).abs() < 0.5, "{t:?} vs {want}");
        }
    }

    #[test]
    fn far_ion_gives_uniform_grating() {
        let s = spec(1e7, (-20.0, 20.0));
        for t in tooth_positions(&s).unwrap() {
            assert!((t.pitch_nm / 308.125 - 1.0).abs() < 1e-3);
        }
    }

    #[test]
    fn tooth_count_is_translation_invariant() {
        let a = spec(40.0, (-25.0, 35.0));
        let b = GratingSpec { ion_x: 1000.0, span: (975.0, 1035.0), ..a };
        assert_eq!(tooth_positions(&a).unwrap().len(), tooth_positions(&b).unwrap().len());
    }

    #[test]
    fn variable_index_reduces_to_constant() {
        let s = spec(50.0, (-10.0, 10.0));
        let a = tooth_positions(&s).unwrap();
        let b = tooth_positions_with_index(&s, |_| 1.6).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert!((x.x_um - y.x_um).abs() < 1e-9);
        }
    }

    #[test]
    fn backward_teeth_violate_floor() {
        // θ = −30° sits at x = −H·tan 30°.
        let h = 20.0;
        let x = -h * 30f64.to_radians().tan();
        let s = spec(h, (x - 1.0, x + 1.0));
        let teeth = tooth_positions(&s).unwrap();
        assert!(!fabrication_lint(&teeth, 240.0).is_empty());
        assert!(fabrication_lint(&teeth, 0.0).is_empty());
        let uniform = tooth_positions(&spec(1e7, (-5.0, 5.0))).unwrap();
        assert!(fabrication_lint(&uniform, 240.0).is_empty());
    }

    #[test]
    fn adiabatic_scaling() {
        assert_eq!(adiabatic_length_scale(0.01, 100.0, 0.01).unwrap(), 100.0);
        assert!((adiabatic_length_scale(0.01, 100.0, 0.0025).unwrap() - 200.0).abs() < 1e-12);
        assert!((adiabatic_length_scale(0.01, 100.0, 0.0001).unwrap() - 1000.0).abs() < 1e-9);
        assert!(adiabatic_length_scale(0.0, 100.0, 0.01).is_err());
    }
}

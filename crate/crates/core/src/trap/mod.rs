//! Five-wire surface-electrode trap: ion height, grating solid-angle
//! exposure and pseudopotential trap strength.
//!
//! Lengths are in micrometres unless noted. The trap axis is `x`; the RF
//! rails run along it and the ion sits at height `h` above the plane.

mod aperture;
mod field;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use aperture::{solid_angle_fraction, solid_angle_monte_carlo, ApertureSpec, MIN_MC_SAMPLES};
pub use field::{
    exposure_strength_tradeoff, radial_frequency, radial_frequency_with_step, rf_null_height, strength_optimal_gap,
    strip_field, TradeoffRow,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrapError {
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("gap a = {a} must be below 2h = {two_h} on the fixed-height curve")]
    GapTooWide { a: f64, two_h: f64 },
    #[error("field point must lie above the electrode plane (y = {0})")]
    BelowPlane(f64),
    #[error("only centered apertures are supported")]
    NotCentered,
    #[error("Monte Carlo needs at least {MIN_MC_SAMPLES} samples, got {0}")]
    TooFewSamples(usize),
    #[error("no RF null found above the trap")]
    NoNull,
    #[error("pseudopotential has no confining curvature at the null")]
    Untrapped,
    #[error(transparent)]
    Numeric(#[from] crate::numeric::NumericError),
}

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64, TrapError> {
    if value > 0.0 && !value.is_nan() {
        Ok(value)
    } else {
        Err(TrapError::NonPositive { name, value })
    }
}

/// Height of the RF null above a five-wire trap with gap `a` and RF rail
/// width `b`: `h = √(a(a+2b))/2`.
pub fn ion_height(a: f64, b: f64) -> Result<f64, TrapError> {
    positive("gap a", a)?;
    if b < 0.0 || b.is_nan() {
        return Err(TrapError::NonPositive { name: "RF width b", value: b });
    }
    Ok((a * (a + 2.0 * b)).sqrt() / 2.0)
}

/// Gap that places the null at height `h` for rail width `b`:
/// `a = √(b² + 4h²) − b`.
pub fn rf_gap_for_height(h: f64, b: f64) -> Result<f64, TrapError> {
    positive("height h", h)?;
    positive("RF width b", b)?;
    // Rationalized to avoid cancellation when b ≫ h.
    Ok(4.0 * h * h / ((b * b + 4.0 * h * h).sqrt() + b))
}

/// Rail width that keeps the null at `h` for gap `a`: `b = (4h² − a²)/(2a)`.
pub fn rf_width_for_height(h: f64, a: f64) -> Result<f64, TrapError> {
    positive("height h", h)?;
    positive("gap a", a)?;
    if a >= 2.0 * h {
        return Err(TrapError::GapTooWide { a, two_h: 2.0 * h });
    }
    Ok((4.0 * h * h - a * a) / (2.0 * a))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrapGeometry {
    /// RF gap (µm).
    pub a: f64,
    /// RF rail width (µm).
    pub b: f64,
    /// Ion height (µm).
    pub h: f64,
    /// Grating length along the trap axis (µm).
    pub l: f64,
    /// RF amplitude (V).
    pub voltage: f64,
    /// RF drive angular frequency (rad/s).
    pub drive_frequency: f64,
    /// Ion charge-to-mass ratio (C/kg).
    pub charge_to_mass: f64,
}

impl TrapGeometry {
    /// Builds the geometry from gap and rail width; the height follows.
    pub fn from_gap(
        a: f64,
        b: f64,
        l: f64,
        voltage: f64,
        drive_frequency: f64,
        charge_to_mass: f64,
    ) -> Result<Self, TrapError> {
        positive("RF width b", b)?;
        positive("grating length l", l)?;
        positive("RF voltage", voltage)?;
        positive("drive frequency", drive_frequency)?;
        positive("charge-to-mass ratio", charge_to_mass)?;
        let h = ion_height(a, b)?;
        Ok(Self { a, b, h, l, voltage, drive_frequency, charge_to_mass })
    }

    /// Builds the geometry on the fixed-height curve from `h` and gap `a`.
    pub fn on_height_curve(
        h: f64,
        a: f64,
        l: f64,
        voltage: f64,
        drive_frequency: f64,
        charge_to_mass: f64,
    ) -> Result<Self, TrapError> {
        let b = rf_width_for_height(h, a)?;
        let mut g = Self::from_gap(a, b, l, voltage, drive_frequency, charge_to_mass)?;
        g.h = h;
        Ok(g)
    }

    /// The grating footprint: length `l` along the axis, width `a` across
    /// the gap, centered below the ion.
    pub fn aperture(&self) -> ApertureSpec {
        ApertureSpec::new(self.l, self.a, self.h)
    }

    /// Inner and outer edges of the two RF rails.
    pub fn rails(&self) -> [(f64, f64); 2] {
        let inner = self.a / 2.0;
        let outer = inner + self.b;
        [(-outer, -inner), (inner, outer)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn height_from_gap() {
        assert!((ion_height(61.80, 50.0).unwrap() - 50.0).abs() < 0.05);
        assert!((ion_height(41.0, 100.0).unwrap() - 49.7).abs() < 0.1);
        assert_eq!(ion_height(100.0, 0.0).unwrap(), 50.0);
    }

    #[test]
    fn gap_from_height() {
        assert!((rf_gap_for_height(50.0, 50.0).unwrap() - 61.80).abs() < 0.01);
        assert!((rf_gap_for_height(50.0, 100.0).unwrap() - 41.4).abs() < 0.1);
        assert!(rf_gap_for_height(50.0, 1e12).unwrap() < 1e-8);
    }

    #[test]
    fn height_and_gap_round_trip() {
        for &(h, b) in &[(50.0, 50.0), (10.0, 300.0), (120.0, 3.0), (75.0, 75.0)] {
            let a = rf_gap_for_height(h, b).unwrap();
            let back = ion_height(a, b).unwrap();
            assert!((back - h).abs() / h < 1e-12);
            let bb = rf_width_for_height(h, a).unwrap();
            assert!((bb - b).abs() / b < 1e-9);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(ion_height(0.0, 50.0).is_err());
        assert!(ion_height(-1.0, 50.0).is_err());
        assert!(rf_gap_for_height(50.0, 0.0).is_err());
        assert!(matches!(rf_width_for_height(50.0, 100.0), Err(TrapError::GapTooWide { .. })));
    }
}

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{positive, TrapError};

pub const MIN_MC_SAMPLES: usize = 10_000;

/// Rectangular collection aperture in the electrode plane, centered below
/// the ion. Either extent may be infinite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApertureSpec {
    /// Extent along the trap axis (µm).
    pub length: f64,
    /// Extent across the RF gap (µm).
    pub width: f64,
    /// Ion height above the plane (µm).
    pub height: f64,
    pub centered: bool,
}

impl ApertureSpec {
    pub fn new(length: f64, width: f64, height: f64) -> Self {
        Self { length, width, height, centered: true }
    }

    pub(crate) fn validate(&self) -> Result<(), TrapError> {
        if !self.centered {
            return Err(TrapError::NotCentered);
        }
        positive("aperture height", self.height)?;
        for (name, v) in [("aperture length", self.length), ("aperture width", self.width)] {
            if v < 0.0 || v.is_nan() {
                return Err(TrapError::NonPositive { name, value: v });
            }
        }
        Ok(())
    }

    pub(crate) fn contains(&self, x: f64, y: f64) -> bool {
        x.abs() <= self.length / 2.0 && y.abs() <= self.width / 2.0
    }
}

/// Fraction of the full sphere subtended by the aperture, `Ω/4π`, with
/// `Ω = 4·atan(αβ / (h·√(α²+β²+h²)))`, `α = l/2`, `β = a/2`.
pub fn solid_angle_fraction(ap: &ApertureSpec) -> Result<f64, TrapError> {
    ap.validate()?;
    let (al, be, h) = (ap.length / 2.0, ap.width / 2.0, ap.height);
    let arg = match (al.is_infinite(), be.is_infinite()) {
        (true, true) => f64::INFINITY,
        (true, false) => be / h,
        (false, true) => al / h,
        (false, false) => al * be / (h * (al * al + be * be + h * h).sqrt()),
    };
    Ok(arg.atan() / PI)
}

/// Monte Carlo estimate of [`solid_angle_fraction`] from directions drawn
/// uniformly over the lower hemisphere. Returns `(estimate, standard error)`.
pub fn solid_angle_monte_carlo(ap: &ApertureSpec, n_samples: usize, seed: u64) -> Result<(f64, f64), TrapError> {
    ap.validate()?;
    if n_samples < MIN_MC_SAMPLES {
        return Err(TrapError::TooFewSamples(n_samples));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0usize;
    for _ in 0..n_samples {
        // cos θ uniform on (0, 1] gives a uniform hemisphere.
        let c: f64 = 1.0 - rng.random::<f64>();
        let phi = 2.0 * PI * rng.random::<f64>();
        let t = ap.height * (1.0 - c * c).sqrt() / c;
        if ap.contains(t * phi.cos(), t * phi.sin()) {
            hits += 1;
        }
    }
    let p = hits as f64 / n_samples as f64;
    let se = 0.5 * (p * (1.0 - p) / n_samples as f64).sqrt();
    Ok((0.5 * p, se))
}

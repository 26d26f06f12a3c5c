use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{positive, rf_width_for_height, solid_angle_fraction, ApertureSpec, TrapError, TrapGeometry};
use crate::numeric::{find_root, golden_max};
use crate::tolerances;

/// Field `(E_x, E_y)` (V/µm) at `(x, y)` of a strip electrode spanning
/// `[x1, x2]` held at `voltage` in an otherwise grounded plane, from
/// `Φ = (V/π)[atan((x2−x)/y) − atan((x1−x)/y)]`.
pub fn strip_field(x1: f64, x2: f64, voltage: f64, (x, y): (f64, f64)) -> Result<[f64; 2], TrapError> {
    if y <= 0.0 || y.is_nan() {
        return Err(TrapError::BelowPlane(y));
    }
    Ok(strip_field_unchecked(x1, x2, voltage, x, y))
}

fn strip_field_unchecked(x1: f64, x2: f64, voltage: f64, x: f64, y: f64) -> [f64; 2] {
    let (u1, u2) = (x1 - x, x2 - x);
    let (r1, r2) = (u1 * u1 + y * y, u2 * u2 + y * y);
    let k = voltage / PI;
    let dphi_dx = k * (y / r1 - y / r2);
    let dphi_dy = k * (u1 / r1 - u2 / r2);
    [-dphi_dx, -dphi_dy]
}

fn rf_field(geom: &TrapGeometry, x: f64, y: f64) -> [f64; 2] {
    geom.rails().iter().fold([0.0, 0.0], |acc, &(x1, x2)| {
        let e = strip_field_unchecked(x1, x2, geom.voltage, x, y);
        [acc[0] + e[0], acc[1] + e[1]]
    })
}

fn field_sq(geom: &TrapGeometry, x: f64, y: f64) -> f64 {
    let [ex, ey] = rf_field(geom, x, y);
    ex * ex + ey * ey
}

/// Height (µm) of the RF null on the symmetry axis, found by root-finding
/// `E_y(0, y)`.
pub fn rf_null_height(geom: &TrapGeometry) -> Result<f64, TrapError> {
    let scale = geom.a + geom.b;
    let lo = 1e-6 * geom.a;
    let hi = 1e4 * scale;
    find_root(|y| rf_field(geom, 0.0, y)[1], lo, hi, 1e-13 * scale).map_err(|_| TrapError::NoNull)
}

/// Radial secular frequency (rad/s) from the pseudopotential
/// `q²|E|²/(4mΩ²)` at the RF null.
pub fn radial_frequency(geom: &TrapGeometry) -> Result<f64, TrapError> {
    radial_frequency_with_step(geom, tolerances::HESSIAN_STEP)
}

/// [`radial_frequency`] with the central-difference step given as a
/// fraction of the ion height.
pub fn radial_frequency_with_step(geom: &TrapGeometry, step_fraction: f64) -> Result<f64, TrapError> {
    positive("step fraction", step_fraction)?;
    let y0 = rf_null_height(geom)?;
    let s = step_fraction * y0;
    let f = |dx: f64, dy: f64| field_sq(geom, dx, y0 + dy);
    let f0 = f(0.0, 0.0);
    let hxx = (f(s, 0.0) - 2.0 * f0 + f(-s, 0.0)) / (s * s);
    let hyy = (f(0.0, s) - 2.0 * f0 + f(0.0, -s)) / (s * s);
    let hxy = (f(s, s) - f(s, -s) - f(-s, s) + f(-s, -s)) / (4.0 * s * s);
    let mean = 0.5 * (hxx + hyy);
    let lambda_max = mean + (0.25 * (hxx - hyy).powi(2) + hxy * hxy).sqrt();
    if lambda_max <= 0.0 || !lambda_max.is_finite() {
        return Err(TrapError::Untrapped);
    }
    // (V/µm)²/µm² → (V/m)²/m².
    let curvature = lambda_max * 1e24;
    let qm = geom.charge_to_mass;
    Ok(qm * (curvature / 4.0).sqrt() / geom.drive_frequency)
}

fn unit_trap_on_curve(h: f64, a: f64) -> Result<TrapGeometry, TrapError> {
    TrapGeometry::on_height_curve(h, a, 1.0, 1.0, 1.0, 1.0)
}

/// Gap `a` and rail width `b` maximizing the radial frequency at fixed
/// height `h` and voltage.
pub fn strength_optimal_gap(h: f64) -> Result<(f64, f64), TrapError> {
    positive("height h", h)?;
    let (a, _) = golden_max(
        |a| unit_trap_on_curve(h, a).and_then(|g| radial_frequency(&g)).unwrap_or(0.0),
        1e-3 * h,
        (2.0 - 1e-3) * h,
        1e-7 * h,
    )?;
    Ok((a, rf_width_for_height(h, a)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TradeoffRow {
    pub a: f64,
    pub b: f64,
    /// Radial frequency relative to the strength-optimal gap.
    pub omega_r_normalized: f64,
    pub exposure: f64,
}

/// Exposure fraction and normalized trap strength along the fixed-height
/// curve `b(a) = (4h² − a²)/(2a)`. `l` may be infinite.
pub fn exposure_strength_tradeoff(h: f64, l: f64, a_grid: &[f64]) -> Result<Vec<TradeoffRow>, TrapError> {
    let (a_opt, _) = strength_optimal_gap(h)?;
    let peak = radial_frequency(&unit_trap_on_curve(h, a_opt)?)?;
    a_grid
        .iter()
        .map(|&a| {
            let g = unit_trap_on_curve(h, a)?;
            let exposure = solid_angle_fraction(&ApertureSpec::new(l, a, h))?;
            Ok(TradeoffRow { a, b: g.b, omega_r_normalized: radial_frequency(&g)? / peak, exposure })
        })
        .collect()
}

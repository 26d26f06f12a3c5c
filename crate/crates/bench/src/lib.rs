//! Shared inputs for the benchmarks.

use num_complex::Complex64;
use pme_core::{
    BasisKet, Channel, JointState, MatchComponent, ModeLabel, ProtocolConfig, ProtocolKind, Qubit, TrapGeometry,
};

/// The reference operating point of each protocol.
pub fn protocol_config(kind: ProtocolKind) -> ProtocolConfig {
    let p_e = if kind == ProtocolKind::Number { 0.05 } else { 1.0 };
    ProtocolConfig::ideal(kind).with_symmetric(p_e, 1.0, 0.01)
}

/// Two photons with matched and orthogonal components entering a
/// splitter, entangled with both ions.
pub fn two_photon_state() -> (JointState, [ModeLabel; 4]) {
    let a = ModeLabel::new(0, Channel::Path);
    let b = ModeLabel::new(1, Channel::Path);
    let modes = [a, b, a.with_match(MatchComponent::Orthogonal), b.with_match(MatchComponent::Orthogonal)];
    let h = Complex64::new(0.5, 0.0);
    let kets = [
        (BasisKet::new(Qubit::Up, Qubit::Down).with_photon(modes[0]).with_photon(modes[1]), h),
        (BasisKet::new(Qubit::Down, Qubit::Up).with_photon(modes[0]).with_photon(modes[3]), h),
        (BasisKet::new(Qubit::Up, Qubit::Up).with_photon(modes[2]).with_photon(modes[1]), h),
        (BasisKet::new(Qubit::Down, Qubit::Down).with_photon(modes[2]).with_photon(modes[3]), h),
    ];
    (JointState::from_pure(&modes, &kets).expect("normalized state"), modes)
}

/// Strength-optimal geometry at 50 µm height for a 40Ca+ ion.
pub fn trap_geometry() -> TrapGeometry {
    let charge_to_mass = 1.602_176_634e-19 / (40.0 * 1.660_539_066_6e-27);
    TrapGeometry::on_height_curve(50.0, 41.42, 100.0, 100.0, 2.0 * std::f64::consts::PI * 30e6, charge_to_mass)
        .expect("valid geometry")
}

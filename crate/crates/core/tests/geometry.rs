use pme_core::emission::{
    collected_fraction, crosstalk_infidelity, temporal_overlap, total_emission, DipoleKind, DipoleTransition,
};
use pme_core::grating::{pitch_for_angle, tooth_positions, GratingSpec};
use pme_core::trap::{
    ion_height, radial_frequency, rf_null_height, solid_angle_fraction, solid_angle_monte_carlo, TrapGeometry,
};
use pme_core::{ApertureSpec, ProtocolConfig, ProtocolKind};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn frac(l: f64, a: f64, h: f64) -> f64 {
    solid_angle_fraction(&ApertureSpec::new(l, a, h)).unwrap()
}

proptest! {
    #[test]
    fn solid_angle_monotone(l in 1.0f64..500.0, a in 1.0f64..500.0, h in 1.0f64..200.0, d in 0.01f64..50.0) {
        let f = frac(l, a, h);
        prop_assert!(frac(l + d, a, h) > f);
        prop_assert!(frac(l, a + d, h) > f);
        prop_assert!(frac(l, a, h + d) < f);
    }

    #[test]
    fn solid_angle_symmetric(l in 0.0f64..500.0, a in 0.0f64..500.0, h in 1.0f64..200.0) {
        prop_assert!((frac(l, a, h) - frac(a, l, h)).abs() <= 1e-15);
    }

    #[test]
    fn collected_fraction_bounded_by_peak(l in 1.0f64..300.0, a in 1.0f64..300.0, h in 5.0f64..100.0, pi in any::<bool>()) {
        let kind = if pi { DipoleKind::Pi } else { DipoleKind::Sigma };
        let ap = ApertureSpec::new(l, a, h);
        let c = collected_fraction(&DipoleTransition::new(kind), &ap).unwrap();
        prop_assert!(c >= 0.0);
        prop_assert!(c <= solid_angle_fraction(&ap).unwrap() * 1.5 + 1e-12);
    }

    #[test]
    fn temporal_overlap_multiplicative(t1 in 0.0f64..20e-9, t2 in 0.0f64..20e-9, tau in 1e-9f64..30e-9) {
        let m = |t| temporal_overlap(t, tau).unwrap();
        prop_assert!((m(t1 + t2) - m(t1) * m(t2)).abs() <= 1e-12);
    }
}

#[test]
fn monte_carlo_agrees_within_three_sigma() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..20 {
        let ap = ApertureSpec::new(
            rng.random_range(5.0..200.0),
            rng.random_range(5.0..200.0),
            rng.random_range(10.0..100.0),
        );
        let exact = solid_angle_fraction(&ap).unwrap();
        let (est, se) = solid_angle_monte_carlo(&ap, 200_000, 100 + i).unwrap();
        assert!((est - exact).abs() <= 3.0 * se, "{ap:?}: {est} ± {se} vs {exact}");
    }
}

#[test]
fn rf_null_matches_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let (a, b) = (rng.random_range(5.0..150.0), rng.random_range(5.0..300.0));
        let g = TrapGeometry::from_gap(a, b, 100.0, 100.0, 2.0 * std::f64::consts::PI * 30e6, 1.0).unwrap();
        let y = rf_null_height(&g).unwrap();
        let h = ion_height(a, b).unwrap();
        assert!((y / h - 1.0).abs() < 1e-3, "a={a} b={b}: {y} vs {h}");
    }
}

#[test]
fn radial_frequency_has_one_interior_peak() {
    let h = 50.0;
    let w: Vec<f64> = (1..100)
        .map(|i| {
            let a = i as f64;
            radial_frequency(&TrapGeometry::on_height_curve(h, a, 100.0, 1.0, 1.0, 1.0).unwrap()).unwrap()
        })
        .collect();
    let rises = w.windows(3).filter(|s| s[1] > s[0] && s[1] > s[2]).count();
    assert_eq!(rises, 1);
}

#[test]
fn dipole_patterns_are_normalized() {
    for kind in [DipoleKind::Pi, DipoleKind::Sigma, DipoleKind::Isotropic] {
        for axis in [[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.6, 0.0, 0.8]] {
            let t = DipoleTransition::with_axis(kind, axis).unwrap();
            assert!((total_emission(&t).unwrap() - 1.0).abs() < 1e-9);
        }
    }
}

#[test]
fn crosstalk_infidelity_monotone_in_amplitude() {
    let c = ProtocolConfig::ideal(ProtocolKind::Polarization).with_symmetric(1.0, 1.0, 0.01);
    let mut prev = -1.0;
    for i in 0..=20 {
        let chi: f64 = i as f64 / 20.0;
        let db = if chi == 0.0 { f64::NEG_INFINITY } else { 20.0 * chi.log10() };
        let inf = crosstalk_infidelity(&c, db).unwrap();
        assert!(inf >= prev - 1e-12, "chi = {chi}");
        prev = inf;
    }
}

fn spec() -> GratingSpec {
    GratingSpec::new(493.0, 1.6, 50.0, (-60.0, 60.0))
}

#[test]
fn grating_pitch_matches_local_angle() {
    let s = spec();
    let teeth = tooth_positions(&s).unwrap();
    for t in &teeth[..teeth.len() - 1] {
        let p = pitch_for_angle(&s, t.angle_deg.to_radians(), 1).unwrap();
        assert!((p - t.pitch_nm).abs() < 0.5, "tooth {}: {p} vs {}", t.index, t.pitch_nm);
    }
}

#[test]
fn grating_count_is_translation_invariant() {
    let base = tooth_positions(&spec()).unwrap().len();
    for shift in [-37.5, 0.1, 12.0, 250.0] {
        let mut s = spec();
        s.ion_x += shift;
        s.span = (s.span.0 + shift, s.span.1 + shift);
        assert_eq!(tooth_positions(&s).unwrap().len(), base);
    }
}

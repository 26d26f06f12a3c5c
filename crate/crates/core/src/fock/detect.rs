use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::bell::IonState;
use super::mode::ModeLabel;
use super::ops::config_counts;
use super::state::JointState;
use super::{check_unit_range, FockError};
use crate::tolerances;

pub const MAX_DETECTORS: usize = 16;

/// Non-number-resolving detector watching a set of modes. A click occurs
/// with probability `1 − (1 − η)^n` for `n` incident photons.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectorSpec {
    pub id: u32,
    pub modes: Vec<ModeLabel>,
    pub efficiency: f64,
}

impl DetectorSpec {
    pub fn new(id: u32, modes: Vec<ModeLabel>, efficiency: f64) -> Self {
        Self { id, modes, efficiency }
    }
}

/// One click pattern. Bit `k` of `pattern` is set when detector `k` (in the
/// order given to [`detect`]) clicked.
#[derive(Clone, Debug)]
pub struct DetectionOutcome {
    pub pattern: u32,
    pub probability: f64,
    /// Conditional ion state, absent when the pattern has negligible weight.
    pub ions: Option<IonState>,
}

impl DetectionOutcome {
    pub fn clicked(&self, detector: usize) -> bool {
        self.pattern >> detector & 1 == 1
    }

    pub fn clicks(&self) -> u32 {
        self.pattern.count_ones()
    }
}

/// Measures all detectors at once and traces out every photonic mode.
///
/// Returns one outcome per click pattern, `2^D` in total, ordered by
/// pattern. Modes not watched by any detector are traced out unobserved.
pub fn detect(state: &JointState, detectors: &[DetectorSpec]) -> Result<Vec<DetectionOutcome>, FockError> {
    if detectors.len() > MAX_DETECTORS {
        return Err(FockError::TooManyDetectors(detectors.len()));
    }
    let mut owner: BTreeMap<ModeLabel, u32> = BTreeMap::new();
    let mut watched = Vec::with_capacity(detectors.len());
    for d in detectors {
        check_unit_range("detector efficiency", d.efficiency)?;
        let mut idx = Vec::with_capacity(d.modes.len());
        for m in &d.modes {
            if let Some(prev) = owner.insert(*m, d.id) {
                return Err(FockError::OverlappingDetectors(prev, d.id, *m));
            }
            idx.push(state.basis.mode_index(m)?);
        }
        watched.push(idx);
    }

    let basis = &state.basis;
    let counts: Vec<Vec<usize>> = watched.iter().map(|w| config_counts(basis, w)).collect();
    let n_patterns = 1usize << detectors.len();
    let mut blocks = vec![IonState::zero_matrix(); n_patterns];

    for cfg in 0..basis.num_configs() {
        let base = cfg * 4;
        let block = state.rho.fixed_view::<4, 4>(base, base).into_owned();
        if block.diagonal().iter().all(|z| z.re.abs() < tolerances::NEGLIGIBLE_PROBABILITY) {
            continue;
        }
        for (pattern, acc) in blocks.iter_mut().enumerate() {
            let mut weight = 1.0;
            for (k, d) in detectors.iter().enumerate() {
                let dark = (1.0 - d.efficiency).powi(counts[k][cfg] as i32);
                weight *= if pattern >> k & 1 == 1 { 1.0 - dark } else { dark };
                if weight == 0.0 {
                    break;
                }
            }
            if weight > 0.0 {
                *acc += block * num_complex::Complex64::new(weight, 0.0);
            }
        }
    }

    Ok(blocks
        .into_iter()
        .enumerate()
        .map(|(pattern, block)| {
            let probability = block.trace().re.max(0.0);
            let ions = (probability > tolerances::NEGLIGIBLE_PROBABILITY).then(|| IonState::from_unnormalized(block));
            DetectionOutcome { pattern: pattern as u32, probability, ions }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{apply_beamsplitter, BasisKet, BeamsplitterSpec, Channel, Qubit};
    use num_complex::Complex64;

    fn two_modes() -> (ModeLabel, ModeLabel) {
        (ModeLabel::new(0, Channel::Path), ModeLabel::new(1, Channel::Path))
    }

    #[test]
    fn outcome_probabilities_sum_to_one() {
        let (a, b) = two_modes();
        let k = |n: u8, m: u8| BasisKet::new(Qubit::Up, Qubit::Down).with_photons(a, n).with_photons(b, m);
        let s = JointState::from_pure(
            &[a, b],
            &[
                (k(1, 1), Complex64::new(0.5, 0.0)),
                (k(0, 0), Complex64::new(0.5, 0.5)),
                (k(2, 0), Complex64::new(0.0, 0.3)),
            ],
        )
        .unwrap();
        let dets = [DetectorSpec::new(0, vec![a], 0.7), DetectorSpec::new(1, vec![b], 0.4)];
        let total: f64 = detect(&s, &dets).unwrap().iter().map(|o| o.probability).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hong_ou_mandel_dip() {
        let (a, b) = two_modes();
        let k = BasisKet::new(Qubit::Down, Qubit::Down).with_photon(a).with_photon(b);
        let s = JointState::from_pure(&[a, b], &[(k, Complex64::new(1.0, 0.0))]).unwrap();
        let s = apply_beamsplitter(&s, &BeamsplitterSpec::new(a, b, 0.5)).unwrap();
        let dets = [DetectorSpec::new(0, vec![a], 1.0), DetectorSpec::new(1, vec![b], 1.0)];
        let out = detect(&s, &dets).unwrap();
        assert!(out[3].probability < 1e-15);
        assert!((out[1].probability - 0.5).abs() < 1e-15);
        assert!(out[3].ions.is_none());
    }

    #[test]
    fn two_photon_click_probability() {
        let (a, _) = two_modes();
        let k = BasisKet::new(Qubit::Down, Qubit::Down).with_photons(a, 2);
        let s = JointState::from_pure(&[a], &[(k, Complex64::new(1.0, 0.0))]).unwrap();
        let out = detect(&s, &[DetectorSpec::new(0, vec![a], 0.5)]).unwrap();
        assert!((out[1].probability - 0.75).abs() < 1e-15);
    }

    #[test]
    fn overlapping_detectors_rejected() {
        let (a, b) = two_modes();
        let k = BasisKet::new(Qubit::Down, Qubit::Down).with_photon(a);
        let s = JointState::from_pure(&[a, b], &[(k, Complex64::new(1.0, 0.0))]).unwrap();
        let dets = [DetectorSpec::new(3, vec![a], 1.0), DetectorSpec::new(5, vec![a, b], 1.0)];
        assert_eq!(detect(&s, &dets).unwrap_err(), FockError::OverlappingDetectors(3, 5, a));
    }

    #[test]
    fn too_many_detectors_rejected() {
        let (a, _) = two_modes();
        let k = BasisKet::new(Qubit::Down, Qubit::Down).with_photon(a);
        let s = JointState::from_pure(&[a], &[(k, Complex64::new(1.0, 0.0))]).unwrap();
        let dets: Vec<_> = (0..17).map(|i| DetectorSpec::new(i, vec![], 1.0)).collect();
        assert_eq!(detect(&s, &dets).unwrap_err(), FockError::TooManyDetectors(17));
    }

    #[test]
    fn unwatched_modes_are_traced_out() {
        let (a, b) = two_modes();
        let k = BasisKet::new(Qubit::Up, Qubit::Up).with_photon(b);
        let s = JointState::from_pure(&[a, b], &[(k, Complex64::new(1.0, 0.0))]).unwrap();
        let out = detect(&s, &[DetectorSpec::new(0, vec![a], 1.0)]).unwrap();
        assert!((out[0].probability - 1.0).abs() < 1e-15);
        let ions = out[0].ions.as_ref().unwrap();
        assert!((ions.matrix()[(3, 3)].re - 1.0).abs() < 1e-15);
    }
}

//! Exact density-operator engine for two ion qubits coupled to a small
//! multimode Fock space.
//!
//! The photonic space is truncated at a total of two photons. Each protocol
//! emits at most one photon per node per attempt, so the truncation is exact
//! for every circuit built from passive linear optics, loss and detection.

mod basis;
mod bell;
mod detect;
mod mode;
mod ops;
mod state;

use thiserror::Error;

pub use bell::{bell_fidelity, BellTarget, Correction, IonState};
pub use detect::{detect, DetectionOutcome, DetectorSpec};
pub use mode::{BasisKet, Channel, MatchComponent, ModeLabel, Qubit, MAX_PHOTONS};
pub use ops::{apply_beamsplitter, apply_crosstalk, apply_loss, apply_mode_unitary, apply_phase, BeamsplitterSpec};
pub use state::{make_state, JointState};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FockError {
    #[error("state needs at least one ket")]
    EmptyState,
    #[error("ket holds {0} photons, the truncation allows at most {MAX_PHOTONS}")]
    TooManyPhotons(usize),
    #[error("amplitudes sum to zero norm")]
    ZeroNorm,
    #[error("mode {0} is not part of the state basis")]
    UnknownMode(ModeLabel),
    #[error("a two-mode element needs distinct modes, got {0} twice")]
    SameMode(ModeLabel),
    #[error("{name} = {value} is outside [0, 1]")]
    OutOfUnitRange { name: &'static str, value: f64 },
    #[error("detectors {0} and {1} both monitor mode {2}")]
    OverlappingDetectors(u32, u32, ModeLabel),
    #[error("too many detectors ({0}); at most 16 are supported")]
    TooManyDetectors(usize),
    #[error("ion density matrix has trace {0}, expected 1")]
    NotNormalized(f64),
    #[error("mode transform is not unitary (defect {0:e})")]
    NotUnitary(f64),
}

pub(crate) fn check_unit_range(name: &'static str, value: f64) -> Result<(), FockError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(FockError::OutOfUnitRange { name, value })
    }
}

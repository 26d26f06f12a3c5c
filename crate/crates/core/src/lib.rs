//! Simulation and analysis of photon-mediated entanglement (PME) between
//! trapped ions collected through trap-integrated photonics.
//!
//! The crate is split by subsystem:
//!
//! - [`fock`]: exact density-operator engine over two ion qubits and a
//!   multimode Fock space truncated at two photons.
//! - [`protocols`]: drivers for the number, time-bin, polarization and
//!   frequency protocols, herald tables and analytic budgets.
//! - [`trap`]: five-wire surface trap geometry, solid-angle exposure and
//!   pseudopotential trap strength.
//! - [`emission`]: dipole emission patterns, aperture collection and
//!   wavepacket overlap.
//! - [`grating`]: grating-equation pitch, chirped tooth placement and
//!   fabrication checks.

pub mod emission;
pub mod error;
pub mod fock;
pub mod grating;
pub mod numeric;
pub mod protocols;
pub mod tolerances;
pub mod trap;

pub use error::{Error, Result};
pub use fock::{
    apply_beamsplitter, apply_crosstalk, apply_loss, apply_phase, bell_fidelity, detect, make_state, BasisKet,
    BeamsplitterSpec, BellTarget, Channel, Correction, DetectionOutcome, DetectorSpec, IonState, JointState,
    MatchComponent, ModeLabel, Qubit,
};
pub use protocols::{HeraldEntry, HeraldTable, NodeParams, ProtocolConfig, ProtocolKind};
pub use trap::{ApertureSpec, TrapGeometry};

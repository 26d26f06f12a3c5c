//! The four photon-mediated entanglement protocols: node states, the
//! Bell-analyzer circuit, herald tables and analytic rate budgets.

mod analysis;
mod circuit;
mod herald;
mod presets;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fock::FockError;

pub use analysis::{
    analytic_herald_prob, balance_excitation, multiplexed_rate, phase_jitter_fidelity, rate_ratio_number_vs_two_photon,
    splitter_imbalance_infidelity, JitterSummary,
};
pub use circuit::{prepare_node_state, run_protocol, NodeTerm};
pub use herald::{HeraldEntry, HeraldTable};
pub use presets::{DetectorPreset, SpeciesPreset, DETECTOR_PRESETS, SPECIES_PRESETS};

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError {
    #[error("{name} = {value} is outside its allowed range {range}")]
    OutOfRange { name: &'static str, value: f64, range: &'static str },
    #[error("time-bin separation {separation:e} s must exceed the excited-state lifetime {lifetime:e} s")]
    BinsOverlap { separation: f64, lifetime: f64 },
    #[error("the frequency protocol needs a non-zero qubit splitting")]
    NoSplitting,
    #[error("{0} must be positive")]
    NonPositive(&'static str),
    #[error("balancing needs p_e2 = {0}, above 1; losses are too asymmetric")]
    CannotBalance(f64),
    #[error(transparent)]
    Fock(#[from] FockError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProtocolKind {
    Number,
    TimeBin,
    Polarization,
    Frequency,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 4] =
        [ProtocolKind::Number, ProtocolKind::TimeBin, ProtocolKind::Polarization, ProtocolKind::Frequency];

    pub fn as_str(self) -> &'static str {
        match self {
            ProtocolKind::Number => "number",
            ProtocolKind::TimeBin => "time-bin",
            ProtocolKind::Polarization => "polarization",
            ProtocolKind::Frequency => "frequency",
        }
    }

    /// Whether a herald needs one photon from each node.
    pub fn is_two_photon(self) -> bool {
        self != ProtocolKind::Number
    }
}

impl std::str::FromStr for ProtocolKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ProtocolKind::ALL.into_iter().find(|k| k.as_str() == s).ok_or_else(|| format!("unknown protocol kind `{s}`"))
    }
}

/// Per-node emission and collection parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeParams {
    /// Excitation probability per attempt.
    pub excitation_prob: f64,
    /// Branching ratio into the heralding channel.
    pub branching: f64,
    /// Collected solid-angle fraction Ω/4π.
    pub solid_angle_fraction: f64,
    /// Transmission from collection to detector.
    pub transmission: f64,
}

impl Default for NodeParams {
    fn default() -> Self {
        Self { excitation_prob: 0.05, branching: 1.0, solid_angle_fraction: 0.1, transmission: 0.1 }
    }
}

impl NodeParams {
    /// Photon delivery probability up to the detector, `Ω/4π · p_t`.
    pub fn collection(&self) -> f64 {
        self.solid_angle_fraction * self.transmission
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub kind: ProtocolKind,
    pub nodes: [NodeParams; 2],
    /// Detector quantum efficiency η_D.
    pub detector_efficiency: f64,
    /// Optical path-length difference between the two arms (m).
    pub path_length_difference: f64,
    /// Photon wavelength λ0 (m).
    pub wavelength: f64,
    /// Frequency difference between the two photonic qubit states (Hz).
    pub splitting: f64,
    /// Mode overlap M between the photons from the two nodes.
    pub mode_overlap: f64,
    /// Analyzer beamsplitter transmissivity.
    pub splitter_transmissivity: f64,
    /// TE1 → TE0 leakage amplitude χ in the polarization mode converter.
    pub crosstalk: f64,
    /// Separate both photonic qubit states at each output port.
    pub enhanced_analyzer: bool,
    /// Time-bin separation Δt (s).
    pub bin_separation: f64,
    /// Excited-state lifetime τ (s).
    pub lifetime: f64,
    /// Qubit frequency mismatch Δω between nodes (rad/s).
    pub qubit_frequency_mismatch: f64,
    /// Multiplicative fidelity factor for motional effects (number only).
    pub temperature_factor: f64,
}

impl ProtocolConfig {
    /// Ideal symmetric configuration for `kind` with 493 nm photons and a
    /// 10 GHz qubit splitting.
    pub fn ideal(kind: ProtocolKind) -> Self {
        Self {
            kind,
            nodes: [NodeParams::default(); 2],
            detector_efficiency: 1.0,
            path_length_difference: 0.0,
            wavelength: 493e-9,
            splitting: 10e9,
            mode_overlap: 1.0,
            splitter_transmissivity: 0.5,
            crosstalk: 0.0,
            enhanced_analyzer: true,
            bin_separation: 100e-9,
            lifetime: 8e-9,
            qubit_frequency_mismatch: 0.0,
            temperature_factor: 1.0,
        }
    }

    /// Sets both nodes to excitation `p_e`, branching `γ` and detection
    /// probability `ε` (carried entirely by the collection fraction).
    pub fn with_symmetric(mut self, p_e: f64, gamma: f64, epsilon: f64) -> Self {
        let node =
            NodeParams { excitation_prob: p_e, branching: gamma, solid_angle_fraction: epsilon, transmission: 1.0 };
        self.nodes = [node; 2];
        self.detector_efficiency = 1.0;
        self
    }

    /// Per-node detection probability `ε = Ω/4π · p_t · η_D`.
    pub fn epsilon(&self, node: usize) -> f64 {
        self.nodes[node].collection() * self.detector_efficiency
    }

    pub fn validate(&self) -> Result<(), ProtocolError> {
        fn unit(name: &'static str, v: f64) -> Result<(), ProtocolError> {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(ProtocolError::OutOfRange { name, value: v, range: "[0, 1]" })
            }
        }
        for n in &self.nodes {
            unit("excitation probability", n.excitation_prob)?;
            unit("transmission", n.transmission)?;
            if !(n.branching > 0.0 && n.branching <= 1.0) {
                return Err(ProtocolError::OutOfRange { name: "branching ratio", value: n.branching, range: "(0, 1]" });
            }
            if !(0.0..0.5).contains(&n.solid_angle_fraction) {
                return Err(ProtocolError::OutOfRange {
                    name: "solid-angle fraction",
                    value: n.solid_angle_fraction,
                    range: "[0, 0.5)",
                });
            }
        }
        unit("detector efficiency", self.detector_efficiency)?;
        unit("mode overlap", self.mode_overlap)?;
        unit("splitter transmissivity", self.splitter_transmissivity)?;
        unit("cross-talk amplitude", self.crosstalk)?;
        unit("temperature factor", self.temperature_factor)?;
        if !(self.wavelength > 0.0) {
            return Err(ProtocolError::NonPositive("wavelength"));
        }
        if !self.path_length_difference.is_finite() {
            return Err(ProtocolError::OutOfRange {
                name: "path-length difference",
                value: self.path_length_difference,
                range: "finite",
            });
        }
        match self.kind {
            ProtocolKind::TimeBin => {
                if !(self.lifetime > 0.0) {
                    return Err(ProtocolError::NonPositive("lifetime"));
                }
                if self.bin_separation <= self.lifetime {
                    return Err(ProtocolError::BinsOverlap {
                        separation: self.bin_separation,
                        lifetime: self.lifetime,
                    });
                }
            }
            ProtocolKind::Frequency if self.splitting == 0.0 => return Err(ProtocolError::NoSplitting),
            _ => {}
        }
        Ok(())
    }

    /// Free-space wavenumber `2π/λ0` (rad/m).
    pub fn wavenumber(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.wavelength
    }

    /// Wavenumber difference `2πΔν/c` between the photonic qubit states.
    pub fn wavenumber_split(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.splitting / SPEED_OF_LIGHT
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ideal_configs_validate() {
        for k in ProtocolKind::ALL {
            ProtocolConfig::ideal(k).validate().unwrap();
            assert_eq!(k.as_str().parse::<ProtocolKind>().unwrap(), k);
        }
    }

    #[test]
    fn time_bin_needs_separated_bins() {
        let mut c = ProtocolConfig::ideal(ProtocolKind::TimeBin);
        c.bin_separation = 5e-9;
        assert!(matches!(c.validate(), Err(ProtocolError::BinsOverlap { .. })));
    }

    #[test]
    fn frequency_needs_splitting() {
        let mut c = ProtocolConfig::ideal(ProtocolKind::Frequency);
        c.splitting = 0.0;
        assert_eq!(c.validate(), Err(ProtocolError::NoSplitting));
    }

    #[test]
    fn epsilon_is_product() {
        let mut c = ProtocolConfig::ideal(ProtocolKind::Number);
        c.nodes[1] = NodeParams { excitation_prob: 0.1, branching: 1.0, solid_angle_fraction: 0.12, transmission: 0.5 };
        c.detector_efficiency = 0.68;
        assert!((c.epsilon(1) - 0.12 * 0.5 * 0.68).abs() < 1e-15);
    }

    #[test]
    fn rejects_out_of_range() {
        let mut c = ProtocolConfig::ideal(ProtocolKind::Polarization);
        c.nodes[0].solid_angle_fraction = 0.5;
        assert!(c.validate().is_err());
        let mut c = ProtocolConfig::ideal(ProtocolKind::Number);
        c.nodes[1].branching = 0.0;
        assert!(c.validate().is_err());
    }
}

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::circuit::{run_protocol, run_with_reference};
use super::{ProtocolConfig, ProtocolError, ProtocolKind};

/// Leading-order herald probability per attempt.
///
/// Number: `p₁γ₁ε₁ + p₂γ₂ε₂` (`2p_eγε` when symmetric). Two-photon kinds:
/// `½(p₁γ₁ε₁)(p₂γ₂ε₂)`, or `¼(…)` for polarization and frequency without
/// the enhanced analyzer.
pub fn analytic_herald_prob(config: &ProtocolConfig) -> f64 {
    let x = |i: usize| {
        let n = &config.nodes[i];
        n.excitation_prob * n.branching * config.epsilon(i)
    };
    match config.kind {
        ProtocolKind::Number => x(0) + x(1),
        ProtocolKind::TimeBin => 0.5 * x(0) * x(1),
        _ if config.enhanced_analyzer => 0.5 * x(0) * x(1),
        _ => 0.25 * x(0) * x(1),
    }
}

/// Ratio of number-protocol to two-photon herald rates,
/// `2p_eγε / (½(γε)²) = 4p_e/(γε)`, with the two-photon scheme driven at
/// unit excitation.
pub fn rate_ratio_number_vs_two_photon(p_e: f64, epsilon: f64, gamma: f64) -> Result<f64, ProtocolError> {
    if !(epsilon > 0.0) {
        return Err(ProtocolError::NonPositive("detection probability ε"));
    }
    if !(gamma > 0.0) {
        return Err(ProtocolError::NonPositive("branching ratio γ"));
    }
    Ok(4.0 * p_e / (gamma * epsilon))
}

/// Excitation probability for node 2 that equalizes `p_e·ε` across nodes.
pub fn balance_excitation(p_e1: f64, epsilon1: f64, epsilon2: f64) -> Result<f64, ProtocolError> {
    if !(epsilon2 > 0.0) {
        return Err(ProtocolError::NonPositive("ε₂"));
    }
    let p = p_e1 * epsilon1 / epsilon2;
    if p > 1.0 {
        return Err(ProtocolError::CannotBalance(p));
    }
    Ok(p)
}

/// Entanglement rate from `sites` independent pairs attempting in parallel.
pub fn multiplexed_rate(attempt_rate: f64, success_prob: f64, sites: usize) -> f64 {
    attempt_rate * success_prob * sites as f64
}

/// Excess infidelity of the dominant herald when the analyzer splitter has
/// transmissivity `t` instead of 1/2, all else equal.
pub fn splitter_imbalance_infidelity(config: &ProtocolConfig, t: f64) -> Result<f64, ProtocolError> {
    let dominant = |t: f64| -> Result<f64, ProtocolError> {
        let cfg = ProtocolConfig { splitter_transmissivity: t, ..config.clone() };
        let table = run_protocol(&cfg)?;
        Ok(table.dominant().and_then(|e| e.fidelity).unwrap_or(0.0))
    };
    Ok(dominant(0.5)? - dominant(t)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JitterSummary {
    /// Heralded fidelity averaged over path-length samples (success weighted).
    pub mean_fidelity: f64,
    /// Heralded fidelity with no jitter.
    pub ideal_fidelity: f64,
    /// Mean herald probability over samples.
    pub mean_success: f64,
    pub samples: usize,
}

impl JitterSummary {
    pub fn penalty(&self) -> f64 {
        self.ideal_fidelity - self.mean_fidelity
    }
}

/// Heralded fidelity when the path-length difference fluctuates as a
/// Gaussian of width `sigma_l` (m) about its nominal value while the
/// feed-forward correction stays tuned to the nominal value.
pub fn phase_jitter_fidelity(
    config: &ProtocolConfig,
    sigma_l: f64,
    samples: usize,
    seed: u64,
) -> Result<JitterSummary, ProtocolError> {
    if !(sigma_l >= 0.0) {
        return Err(ProtocolError::OutOfRange { name: "σ_l", value: sigma_l, range: "[0, ∞)" });
    }
    let nominal = config.path_length_difference;
    let ideal = run_protocol(config)?;
    let ideal_fidelity = ideal.heralded_fidelity().unwrap_or(0.0);
    if sigma_l == 0.0 || samples == 0 {
        return Ok(JitterSummary {
            mean_fidelity: ideal_fidelity,
            ideal_fidelity,
            mean_success: ideal.total_success,
            samples: 0,
        });
    }
    let normal = Normal::new(nominal, sigma_l).map_err(|_| ProtocolError::NonPositive("σ_l"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut weighted, mut success) = (0.0, 0.0);
    for _ in 0..samples {
        let cfg = ProtocolConfig { path_length_difference: normal.sample(&mut rng), ..config.clone() };
        let table = run_with_reference(&cfg, nominal)?;
        weighted += table.heralded_fidelity().unwrap_or(0.0) * table.total_success;
        success += table.total_success;
    }
    Ok(JitterSummary {
        mean_fidelity: if success > 0.0 { weighted / success } else { 0.0 },
        ideal_fidelity,
        mean_success: success / samples as f64,
        samples,
    })
}

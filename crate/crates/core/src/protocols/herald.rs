use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use super::{ProtocolConfig, ProtocolKind};
use crate::fock::{BellTarget, Correction, DetectionOutcome, IonState};

/// Heralded Bell state and the base feed-forward phase for a click pattern.
pub(crate) type HeraldRule = (BellTarget, f64);

/// Fixed herald table per protocol.
///
/// Detector order (bit index) is:
/// - number: `d0`, `d1`;
/// - time-bin: `d0-early`, `d1-early`, `d0-late`, `d1-late`;
/// - polarization / frequency, enhanced: `d0-↓`, `d0-↑`, `d1-↓`, `d1-↑`
///   (↓ is π or red, ↑ is σ or blue);
/// - polarization / frequency, plain: `d0`, `d1`.
///
/// The correction applies `e^{iθ}` to `|↑⟩` of ion 1 with `θ` equal to the
/// base phase plus the optical phase picked up by node 1's photon.
pub(crate) fn herald_rule(kind: ProtocolKind, enhanced: bool, pattern: u32) -> Option<HeraldRule> {
    let bit = |k: u32| pattern >> k & 1 == 1;
    match kind {
        ProtocolKind::Number => match pattern {
            0b01 => Some((BellTarget::PsiPlus, FRAC_PI_2)),
            0b10 => Some((BellTarget::PsiPlus, -FRAC_PI_2)),
            _ => None,
        },
        // Bits 0/1 and 2/3 pair up as (port 0, port 1) for each of the two
        // photonic states.
        ProtocolKind::TimeBin => two_state_rule(pattern, [bit(0), bit(1), bit(2), bit(3)]),
        ProtocolKind::Polarization | ProtocolKind::Frequency if enhanced => {
            two_state_rule(pattern, [bit(0), bit(2), bit(1), bit(3)])
        }
        ProtocolKind::Polarization | ProtocolKind::Frequency => {
            (pattern == 0b11).then_some((BellTarget::PsiMinus, 0.0))
        }
    }
}

/// `clicks` = [port0/state A, port1/state A, port0/state B, port1/state B].
/// Exactly one click per photonic state; same port gives Ψ⁺, opposite
/// ports give Ψ⁻.
fn two_state_rule(pattern: u32, clicks: [bool; 4]) -> Option<HeraldRule> {
    if pattern.count_ones() != 2 || clicks[0] == clicks[1] || clicks[2] == clicks[3] {
        return None;
    }
    let same_port = clicks[0] == clicks[2];
    Some((if same_port { BellTarget::PsiPlus } else { BellTarget::PsiMinus }, 0.0))
}

/// One row of a herald table.
#[derive(Clone, Debug, Serialize)]
pub struct HeraldEntry {
    pub pattern: u32,
    pub probability: f64,
    /// Whether this pattern heralds entanglement.
    pub valid: bool,
    pub target: Option<BellTarget>,
    pub correction: Option<Correction>,
    /// Ion state conditioned on the pattern (before correction).
    #[serde(skip)]
    pub ions: Option<IonState>,
    /// Corrected Bell fidelity, for valid patterns with non-zero weight.
    pub fidelity: Option<f64>,
}

impl HeraldEntry {
    pub(crate) fn new(
        outcome: DetectionOutcome,
        rule: Option<HeraldRule>,
        phase: f64,
        config: &ProtocolConfig,
    ) -> Self {
        let scale = if config.kind == ProtocolKind::Number { config.temperature_factor } else { 1.0 };
        let correction = rule.map(|(_, base)| Correction::phase(base + phase));
        let fidelity = match (&outcome.ions, rule, &correction) {
            (Some(ions), Some((target, _)), Some(c)) => Some(scale * ions.fidelity(target, c)),
            _ => None,
        };
        Self {
            pattern: outcome.pattern,
            probability: outcome.probability,
            valid: rule.is_some(),
            target: rule.map(|r| r.0),
            correction,
            ions: outcome.ions,
            fidelity,
        }
    }
}

/// Every click pattern of one attempt with its probability and, for
/// heralding patterns, the corrected Bell fidelity.
#[derive(Clone, Debug, Serialize)]
pub struct HeraldTable {
    pub kind: ProtocolKind,
    pub detectors: Vec<String>,
    pub entries: Vec<HeraldEntry>,
    pub total_success: f64,
}

impl HeraldTable {
    pub(crate) fn new(kind: ProtocolKind, detectors: Vec<String>, entries: Vec<HeraldEntry>) -> Self {
        let total_success = entries.iter().filter(|e| e.valid).map(|e| e.probability).sum();
        Self { kind, detectors, entries, total_success }
    }

    pub fn valid_entries(&self) -> impl Iterator<Item = &HeraldEntry> {
        self.entries.iter().filter(|e| e.valid)
    }

    /// Sum over all patterns; 1 up to rounding.
    pub fn probability_sum(&self) -> f64 {
        self.entries.iter().map(|e| e.probability).sum()
    }

    /// Success-weighted mean fidelity over heralding patterns.
    pub fn heralded_fidelity(&self) -> Option<f64> {
        let (num, den) = self
            .valid_entries()
            .filter_map(|e| e.fidelity.map(|f| (e.probability * f, e.probability)))
            .fold((0.0, 0.0), |acc, x| (acc.0 + x.0, acc.1 + x.1));
        (den > 0.0).then(|| num / den)
    }

    /// The most likely heralding pattern (lowest pattern on ties).
    pub fn dominant(&self) -> Option<&HeraldEntry> {
        self.valid_entries().filter(|e| e.fidelity.is_some()).fold(None, |best: Option<&HeraldEntry>, e| match best {
            Some(b) if b.probability >= e.probability => Some(b),
            _ => Some(e),
        })
    }

    /// Names of the detectors that clicked in `pattern`.
    pub fn clicked(&self, pattern: u32) -> Vec<&str> {
        self.detectors.iter().enumerate().filter(|(i, _)| pattern >> i & 1 == 1).map(|(_, n)| n.as_str()).collect()
    }
}

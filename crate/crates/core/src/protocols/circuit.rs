use num_complex::Complex64;

use super::herald::{herald_rule, HeraldEntry, HeraldTable};
use super::{NodeParams, ProtocolConfig, ProtocolError, ProtocolKind};
use crate::fock::{
    apply_beamsplitter, apply_crosstalk, apply_loss, apply_phase, detect, BasisKet, BeamsplitterSpec, Channel,
    DetectorSpec, JointState, MatchComponent, ModeLabel, Qubit,
};

/// One term `amplitude · |ion; photon⟩` of a single node's state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NodeTerm {
    pub ion: Qubit,
    pub photon: Option<Channel>,
    pub amplitude: f64,
}

impl NodeTerm {
    fn new(ion: Qubit, photon: Option<Channel>, amplitude: f64) -> Self {
        Self { ion, photon, amplitude }
    }
}

/// Photonic channels used by `kind`, ordered (↓-associated, ↑-associated).
/// The number protocol has a single path channel.
pub(crate) fn channels(kind: ProtocolKind) -> &'static [Channel] {
    match kind {
        ProtocolKind::Number => &[Channel::Path],
        ProtocolKind::TimeBin => &[Channel::BinEarly, Channel::BinLate],
        ProtocolKind::Polarization => &[Channel::Te0, Channel::Te1],
        ProtocolKind::Frequency => &[Channel::FreqRed, Channel::FreqBlue],
    }
}

/// State of one node after an excitation attempt, as a mixture of
/// unnormalized pure components. Decays out of the heralding channel are
/// kept as separate photon-free components.
pub fn prepare_node_state(kind: ProtocolKind, node: &NodeParams) -> Vec<Vec<NodeTerm>> {
    let p = node.excitation_prob;
    let emit = (p * node.branching).sqrt();
    let stay = (1.0 - p).sqrt();
    let lost = (p * (1.0 - node.branching)).sqrt();
    let (down, up) = (Qubit::Down, Qubit::Up);
    let mut comps = match kind {
        ProtocolKind::Number => vec![
            vec![NodeTerm::new(down, None, stay), NodeTerm::new(up, Some(Channel::Path), emit)],
            vec![NodeTerm::new(up, None, lost)],
        ],
        ProtocolKind::TimeBin => {
            // Equal superposition; |↑⟩ is excited in the early bin, then a
            // π flip swaps the qubit before the late excitation.
            let h = std::f64::consts::FRAC_1_SQRT_2;
            vec![
                vec![
                    NodeTerm::new(down, Some(Channel::BinEarly), h * emit),
                    NodeTerm::new(down, None, h * stay),
                    NodeTerm::new(up, Some(Channel::BinLate), h * emit),
                    NodeTerm::new(up, None, h * stay),
                ],
                vec![NodeTerm::new(down, None, h * lost)],
                vec![NodeTerm::new(up, None, h * lost)],
            ]
        }
        ProtocolKind::Polarization | ProtocolKind::Frequency => {
            let [ch_down, ch_up] = [channels(kind)[0], channels(kind)[1]];
            let h = std::f64::consts::FRAC_1_SQRT_2;
            vec![
                vec![
                    NodeTerm::new(up, Some(ch_up), h * emit),
                    NodeTerm::new(down, Some(ch_down), h * emit),
                    NodeTerm::new(down, None, stay),
                ],
                vec![NodeTerm::new(up, None, h * lost)],
                vec![NodeTerm::new(down, None, h * lost)],
            ]
        }
    };
    for c in &mut comps {
        c.retain(|t| t.amplitude != 0.0);
    }
    comps.retain(|c| !c.is_empty());
    comps
}

fn match_components(config: &ProtocolConfig) -> Vec<MatchComponent> {
    if config.mode_overlap < 1.0 {
        vec![MatchComponent::Matched, MatchComponent::Orthogonal]
    } else {
        vec![MatchComponent::Matched]
    }
}

/// Photon modes created by a node term; node 1 carries the mode mismatch.
fn photon_modes(node: u8, ch: Channel, overlap: f64) -> Vec<(ModeLabel, f64)> {
    let matched = ModeLabel::new(node, ch);
    if node == 0 || overlap >= 1.0 {
        return vec![(matched, 1.0)];
    }
    let mut out = vec![(matched, overlap.sqrt())];
    let orth = (1.0 - overlap).sqrt();
    if orth > 0.0 {
        out.push((matched.with_match(MatchComponent::Orthogonal), orth));
    }
    out
}

fn joint_components(config: &ProtocolConfig) -> Vec<Vec<(BasisKet, Complex64)>> {
    let n0 = prepare_node_state(config.kind, &config.nodes[0]);
    let n1 = prepare_node_state(config.kind, &config.nodes[1]);
    let expand = |node: u8, t: &NodeTerm| -> Vec<(Option<ModeLabel>, f64)> {
        match t.photon {
            None => vec![(None, t.amplitude)],
            Some(ch) => photon_modes(node, ch, config.mode_overlap)
                .into_iter()
                .map(|(m, a)| (Some(m), a * t.amplitude))
                .collect(),
        }
    };
    let mut out = Vec::new();
    for c0 in &n0 {
        for c1 in &n1 {
            let mut comp = Vec::new();
            for t0 in c0 {
                for t1 in c1 {
                    for (m0, a0) in expand(0, t0) {
                        for (m1, a1) in expand(1, t1) {
                            let mut ket = BasisKet::new(t0.ion, t1.ion);
                            for m in [m0, m1].into_iter().flatten() {
                                ket = ket.with_photon(m);
                            }
                            comp.push((ket, Complex64::new(a0 * a1, 0.0)));
                        }
                    }
                }
            }
            out.push(comp);
        }
    }
    out
}

/// Optical phase on node 1's photon in `ch` for path difference `dl`.
fn channel_phase(config: &ProtocolConfig, ch: Channel, dl: f64) -> f64 {
    let mut k = config.wavenumber();
    if matches!(ch, Channel::Te1 | Channel::FreqBlue | Channel::BinLate) {
        k += config.wavenumber_split();
    }
    let mut phi = k * dl;
    if ch == Channel::BinLate {
        phi += config.qubit_frequency_mismatch * config.bin_separation;
    }
    phi
}

/// Relative phase the heralded ion state acquires from node 1's photon,
/// which the correction must undo.
pub(crate) fn herald_phase(config: &ProtocolConfig, dl: f64) -> f64 {
    let ch = channels(config.kind);
    match ch {
        [single] => channel_phase(config, *single, dl),
        [down, up] => channel_phase(config, *up, dl) - channel_phase(config, *down, dl),
        _ => unreachable!("protocols use one or two channels"),
    }
}

pub(crate) fn detectors(config: &ProtocolConfig) -> (Vec<DetectorSpec>, Vec<String>) {
    let matches = match_components(config);
    let eta = config.detector_efficiency;
    let modes = |port: u8, chs: &[Channel]| -> Vec<ModeLabel> {
        chs.iter().flat_map(|&c| matches.iter().map(move |&m| ModeLabel::new(port, c).with_match(m))).collect()
    };
    let chs = channels(config.kind);
    let groups: Vec<(u8, Vec<Channel>, String)> = match config.kind {
        ProtocolKind::Number => (0..2).map(|p| (p, vec![Channel::Path], format!("d{p}"))).collect(),
        ProtocolKind::TimeBin => [Channel::BinEarly, Channel::BinLate]
            .iter()
            .flat_map(|&c| (0..2).map(move |p| (p, vec![c], format!("d{p}-{}", c.as_str()))))
            .collect(),
        _ if config.enhanced_analyzer => {
            (0..2).flat_map(|p| chs.iter().map(move |&c| (p, vec![c], format!("d{p}-{}", c.as_str())))).collect()
        }
        _ => (0..2).map(|p| (p, chs.to_vec(), format!("d{p}"))).collect(),
    };
    groups
        .into_iter()
        .enumerate()
        .map(|(i, (port, chans, name))| (DetectorSpec::new(i as u32, modes(port, &chans), eta), name))
        .unzip()
}

/// Runs one entanglement attempt and tabulates every click pattern.
pub fn run_protocol(config: &ProtocolConfig) -> Result<HeraldTable, ProtocolError> {
    run_with_reference(config, config.path_length_difference)
}

/// As [`run_protocol`], with corrections computed for the path difference
/// `reference_dl` rather than the actual one.
pub(crate) fn run_with_reference(config: &ProtocolConfig, reference_dl: f64) -> Result<HeraldTable, ProtocolError> {
    config.validate()?;
    let matches = match_components(config);
    let chs = channels(config.kind);
    let modes: Vec<ModeLabel> = (0..2u8)
        .flat_map(|p| {
            let matches = &matches;
            chs.iter().flat_map(move |&c| matches.iter().map(move |&m| ModeLabel::new(p, c).with_match(m)))
        })
        .collect();

    let mut state = JointState::from_mixture(&modes, &joint_components(config))?;

    if config.kind == ProtocolKind::Polarization && config.crosstalk > 0.0 {
        let from = ModeLabel::new(0, Channel::Te1);
        let to = ModeLabel::new(0, Channel::Te0);
        state = apply_crosstalk(&state, &from, &to, config.crosstalk)?;
    }

    for &c in chs {
        let phi = channel_phase(config, c, config.path_length_difference);
        if phi != 0.0 {
            for &m in &matches {
                state = apply_phase(&state, &ModeLabel::new(1, c).with_match(m), phi)?;
            }
        }
    }

    for node in 0..2u8 {
        let t = config.nodes[node as usize].collection();
        if t < 1.0 {
            for mode in modes.iter().filter(|m| m.node == node) {
                state = apply_loss(&state, mode, t)?;
            }
        }
    }

    for &c in chs {
        for &m in &matches {
            let bs = BeamsplitterSpec::new(
                ModeLabel::new(0, c).with_match(m),
                ModeLabel::new(1, c).with_match(m),
                config.splitter_transmissivity,
            );
            state = apply_beamsplitter(&state, &bs)?;
        }
    }

    let (dets, names) = detectors(config);
    let outcomes = detect(&state, &dets)?;
    let phase = herald_phase(config, reference_dl);
    let entries = outcomes
        .into_iter()
        .map(|o| {
            let rule = herald_rule(config.kind, config.enhanced_analyzer, o.pattern);
            HeraldEntry::new(o, rule, phase, config)
        })
        .collect();
    Ok(HeraldTable::new(config.kind, names, entries))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn weight(comps: &[Vec<NodeTerm>]) -> f64 {
        comps.iter().flatten().map(|t| t.amplitude * t.amplitude).sum()
    }

    #[test]
    fn node_states_are_normalized() {
        let node = NodeParams { excitation_prob: 0.3, branching: 0.7, solid_angle_fraction: 0.1, transmission: 1.0 };
        for k in ProtocolKind::ALL {
            assert!((weight(&prepare_node_state(k, &node)) - 1.0).abs() < 1e-15, "{k:?}");
        }
    }

    #[test]
    fn number_node_limits() {
        let mut node = NodeParams { excitation_prob: 0.0, ..NodeParams::default() };
        let s = prepare_node_state(ProtocolKind::Number, &node);
        assert_eq!(s, vec![vec![NodeTerm::new(Qubit::Down, None, 1.0)]]);
        node.excitation_prob = 1.0;
        let s = prepare_node_state(ProtocolKind::Number, &node);
        assert_eq!(s, vec![vec![NodeTerm::new(Qubit::Up, Some(Channel::Path), 1.0)]]);
    }

    #[test]
    fn ideal_time_bin_node_is_maximally_entangled() {
        let node = NodeParams { excitation_prob: 1.0, branching: 1.0, ..NodeParams::default() };
        let s = prepare_node_state(ProtocolKind::TimeBin, &node);
        assert_eq!(s.len(), 1);
        // Pure two-qubit (ion ⊗ bin) amplitudes; concurrence 2|ad − bc|.
        let amp = |q, c| s[0].iter().find(|t| t.ion == q && t.photon == Some(c)).map_or(0.0, |t| t.amplitude);
        let (a, b) = (amp(Qubit::Down, Channel::BinEarly), amp(Qubit::Down, Channel::BinLate));
        let (c, d) = (amp(Qubit::Up, Channel::BinEarly), amp(Qubit::Up, Channel::BinLate));
        assert!((2.0 * (a * d - b * c).abs() - 1.0).abs() < 1e-15);
        assert!((a * a + b * b - 0.5).abs() < 1e-15);
    }
}

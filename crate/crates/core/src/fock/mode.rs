use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::FockError;

/// Largest total photon number the engine represents.
pub const MAX_PHOTONS: usize = 2;

/// Photonic degree of freedom carried by a mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Channel {
    Path,
    Te0,
    Te1,
    FreqRed,
    FreqBlue,
    BinEarly,
    BinLate,
}

impl Channel {
    pub fn as_str(self) -> &'static str {
        match self {
            Channel::Path => "path",
            Channel::Te0 => "te0",
            Channel::Te1 => "te1",
            Channel::FreqRed => "freq-red",
            Channel::FreqBlue => "freq-blue",
            Channel::BinEarly => "bin-early",
            Channel::BinLate => "bin-late",
        }
    }
}

/// Internal (spatio-temporal) component of a photon. Photons in different
/// components never interfere.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatchComponent {
    Matched,
    Orthogonal,
}

/// One bosonic mode. Ordering is lexicographic over (node, channel, match),
/// which fixes the basis enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ModeLabel {
    pub node: u8,
    pub channel: Channel,
    pub matching: MatchComponent,
}

impl ModeLabel {
    pub const fn new(node: u8, channel: Channel) -> Self {
        Self { node, channel, matching: MatchComponent::Matched }
    }

    pub const fn with_match(self, matching: MatchComponent) -> Self {
        Self { matching, ..self }
    }
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = match self.matching {
            MatchComponent::Matched => "m",
            MatchComponent::Orthogonal => "o",
        };
        write!(f, "n{}/{}/{}", self.node, self.channel.as_str(), m)
    }
}

/// Ground-state qubit level of an ion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Qubit {
    Down,
    Up,
}

impl Qubit {
    pub(crate) fn bit(self) -> usize {
        match self {
            Qubit::Down => 0,
            Qubit::Up => 1,
        }
    }

    pub(crate) fn from_bit(bit: usize) -> Self {
        if bit & 1 == 0 {
            Qubit::Down
        } else {
            Qubit::Up
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Qubit::Down => Qubit::Up,
            Qubit::Up => Qubit::Down,
        }
    }
}

/// A product basis vector: two ion levels and the photon count per mode.
/// Modes absent from `occupations` are in vacuum.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisKet {
    pub ion1: Qubit,
    pub ion2: Qubit,
    pub occupations: BTreeMap<ModeLabel, u8>,
}

impl BasisKet {
    pub fn new(ion1: Qubit, ion2: Qubit) -> Self {
        Self { ion1, ion2, occupations: BTreeMap::new() }
    }

    /// Adds one photon to `mode`.
    pub fn with_photon(mut self, mode: ModeLabel) -> Self {
        *self.occupations.entry(mode).or_insert(0) += 1;
        self
    }

    pub fn with_photons(mut self, mode: ModeLabel, count: u8) -> Self {
        if count > 0 {
            *self.occupations.entry(mode).or_insert(0) += count;
        }
        self
    }

    pub fn total_photons(&self) -> usize {
        self.occupations.values().map(|&n| n as usize).sum()
    }

    pub fn occupation(&self, mode: &ModeLabel) -> u8 {
        self.occupations.get(mode).copied().unwrap_or(0)
    }

    pub(crate) fn check_truncation(&self) -> Result<(), FockError> {
        let total = self.total_photons();
        if total > MAX_PHOTONS {
            Err(FockError::TooManyPhotons(total))
        } else {
            Ok(())
        }
    }
}

impl fmt::Display for BasisKet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arrow = |q: Qubit| if q == Qubit::Up { "↑" } else { "↓" };
        write!(f, "|{}{};", arrow(self.ion1), arrow(self.ion2))?;
        let mut first = true;
        for (mode, n) in self.occupations.iter().filter(|(_, &n)| n > 0) {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{n}:{mode}")?;
            first = false;
        }
        if first {
            write!(f, "vac")?;
        }
        write!(f, "⟩")
    }
}

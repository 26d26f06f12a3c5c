use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;

use super::mode::{BasisKet, ModeLabel, Qubit};
use super::FockError;

/// Photon content of a basis vector as sorted mode indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) enum PhotonConfig {
    Vacuum,
    One(usize),
    /// Two photons, `i <= j`; `i == j` is a doubly occupied mode.
    Two(usize, usize),
}

impl PhotonConfig {
    pub(crate) fn count_in(self, mode: usize) -> usize {
        match self {
            PhotonConfig::Vacuum => 0,
            PhotonConfig::One(i) => usize::from(i == mode),
            PhotonConfig::Two(i, j) => usize::from(i == mode) + usize::from(j == mode),
        }
    }

    pub(crate) fn modes(self) -> impl Iterator<Item = usize> {
        let (a, b) = match self {
            PhotonConfig::Vacuum => (None, None),
            PhotonConfig::One(i) => (Some(i), None),
            PhotonConfig::Two(i, j) => (Some(i), Some(j)),
        };
        a.into_iter().chain(b)
    }

    fn from_modes(mut modes: Vec<usize>) -> Self {
        modes.sort_unstable();
        match modes.as_slice() {
            [] => PhotonConfig::Vacuum,
            [i] => PhotonConfig::One(*i),
            [i, j] => PhotonConfig::Two(*i, *j),
            _ => unreachable!("truncation checked by caller"),
        }
    }

    /// Image of this Fock vector when every creation operator a†_m is
    /// replaced by `Σ c a†_m'` from `image(m)`.
    pub(crate) fn transform(self, image: impl Fn(usize) -> Vec<(usize, Complex64)>) -> Vec<(PhotonConfig, Complex64)> {
        match self {
            PhotonConfig::Vacuum => vec![(PhotonConfig::Vacuum, Complex64::new(1.0, 0.0))],
            PhotonConfig::One(i) => image(i).into_iter().map(|(m, c)| (PhotonConfig::One(m), c)).collect(),
            PhotonConfig::Two(i, j) => {
                // |1_i 1_j⟩ = a†_i a†_j |0⟩ and |2_i⟩ = a†_i² |0⟩ / √2.
                let norm_in = if i == j { std::f64::consts::SQRT_2 } else { 1.0 };
                let mut acc: BTreeMap<PhotonConfig, Complex64> = BTreeMap::new();
                let img_j = image(j);
                for (m1, c1) in image(i) {
                    for &(m2, c2) in &img_j {
                        let (cfg, norm_out) = if m1 == m2 {
                            (PhotonConfig::Two(m1, m1), std::f64::consts::SQRT_2)
                        } else {
                            (PhotonConfig::Two(m1.min(m2), m1.max(m2)), 1.0)
                        };
                        *acc.entry(cfg).or_default() += c1 * c2 * norm_out / norm_in;
                    }
                }
                acc.into_iter().filter(|(_, c)| c.norm_sqr() > 0.0).collect()
            }
        }
    }

    /// Removes `r` photons from `mode`; `None` if fewer are present.
    pub(crate) fn remove(self, mode: usize, r: usize) -> Option<PhotonConfig> {
        if r == 0 {
            return Some(self);
        }
        let mut modes: Vec<usize> = self.modes().collect();
        for _ in 0..r {
            let pos = modes.iter().position(|&m| m == mode)?;
            modes.remove(pos);
        }
        Some(PhotonConfig::from_modes(modes))
    }
}

/// Enumeration of the product basis. Index layout is
/// `config_index * 4 + ion1 * 2 + ion2` with Down = 0, Up = 1.
#[derive(Debug, PartialEq)]
pub(crate) struct Basis {
    modes: Vec<ModeLabel>,
    configs: Vec<PhotonConfig>,
    config_index: HashMap<PhotonConfig, usize>,
}

impl Basis {
    pub(crate) fn new(mut modes: Vec<ModeLabel>) -> Self {
        modes.sort();
        modes.dedup();
        let m = modes.len();
        let mut configs = vec![PhotonConfig::Vacuum];
        configs.extend((0..m).map(PhotonConfig::One));
        for i in 0..m {
            for j in i..m {
                configs.push(PhotonConfig::Two(i, j));
            }
        }
        let config_index = configs.iter().enumerate().map(|(k, &c)| (c, k)).collect();
        Self { modes, configs, config_index }
    }

    pub(crate) fn modes(&self) -> &[ModeLabel] {
        &self.modes
    }

    pub(crate) fn dim(&self) -> usize {
        self.configs.len() * 4
    }

    pub(crate) fn mode_index(&self, mode: &ModeLabel) -> Result<usize, FockError> {
        self.modes.binary_search(mode).map_err(|_| FockError::UnknownMode(*mode))
    }

    pub(crate) fn config(&self, index: usize) -> PhotonConfig {
        self.configs[index / 4]
    }

    pub(crate) fn ion_index(index: usize) -> usize {
        index % 4
    }

    pub(crate) fn index(&self, config: PhotonConfig, ions: usize) -> usize {
        self.config_index[&config] * 4 + ions
    }

    pub(crate) fn num_configs(&self) -> usize {
        self.configs.len()
    }

    pub(crate) fn ket(&self, index: usize) -> BasisKet {
        let ions = Self::ion_index(index);
        let mut ket = BasisKet::new(Qubit::from_bit(ions >> 1), Qubit::from_bit(ions));
        for m in self.config(index).modes() {
            ket = ket.with_photon(self.modes[m]);
        }
        ket
    }

    pub(crate) fn index_of(&self, ket: &BasisKet) -> Result<usize, FockError> {
        ket.check_truncation()?;
        let mut modes = Vec::with_capacity(2);
        for (mode, &n) in &ket.occupations {
            let idx = self.mode_index(mode)?;
            modes.extend(std::iter::repeat_n(idx, n as usize));
        }
        let ions = ket.ion1.bit() * 2 + ket.ion2.bit();
        Ok(self.index(PhotonConfig::from_modes(modes), ions))
    }
}

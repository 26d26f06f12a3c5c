use serde::Serialize;

/// Transition wavelengths and ground-state hyperfine splittings of common
/// ion species.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpeciesPreset {
    pub name: &'static str,
    /// S½ → P½ wavelength (nm).
    pub p_half_nm: f64,
    /// S½ → P3/2 wavelength (nm).
    pub p_three_half_nm: f64,
    /// (isotope mass number, hyperfine splitting in GHz).
    pub hyperfine: &'static [(u16, f64)],
}

pub const SPECIES_PRESETS: [SpeciesPreset; 4] = [
    SpeciesPreset { name: "Ca+", p_half_nm: 397.0, p_three_half_nm: 393.0, hyperfine: &[(43, 3.2)] },
    SpeciesPreset { name: "Sr+", p_half_nm: 422.0, p_three_half_nm: 408.0, hyperfine: &[(87, 5.0)] },
    SpeciesPreset { name: "Ba+", p_half_nm: 493.0, p_three_half_nm: 455.0, hyperfine: &[(133, 9.9), (137, 8.0)] },
    SpeciesPreset { name: "Yb+", p_half_nm: 369.0, p_three_half_nm: 329.0, hyperfine: &[(171, 12.6), (173, 10.5)] },
];

impl SpeciesPreset {
    pub fn find(name: &str) -> Option<&'static SpeciesPreset> {
        let key = name.trim_end_matches('+').to_ascii_lowercase();
        SPECIES_PRESETS.iter().find(|s| s.name.trim_end_matches('+').to_ascii_lowercase() == key)
    }

    /// Hyperfine splitting (Hz) of the given isotope.
    pub fn splitting_hz(&self, isotope: u16) -> Option<f64> {
        self.hyperfine.iter().find(|(m, _)| *m == isotope).map(|(_, ghz)| ghz * 1e9)
    }
}

/// Demonstrated trap-integrated detector efficiencies.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DetectorPreset {
    pub name: &'static str,
    pub efficiency: f64,
}

pub const DETECTOR_PRESETS: [DetectorPreset; 2] =
    [DetectorPreset { name: "snspd", efficiency: 0.68 }, DetectorPreset { name: "spad", efficiency: 0.40 }];

impl DetectorPreset {
    pub fn find(name: &str) -> Option<&'static DetectorPreset> {
        DETECTOR_PRESETS.iter().find(|d| d.name.eq_ignore_ascii_case(name))
    }
}

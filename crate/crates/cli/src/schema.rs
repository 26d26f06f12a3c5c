//! Parameter schemas for each command.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::units::Dimension;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    ProtocolSim,
    GeometrySweep,
    GratingDesign,
    RateTable,
    TradeoffCurve,
}

impl Command {
    pub const ALL: [Command; 5] = [
        Command::ProtocolSim,
        Command::GeometrySweep,
        Command::GratingDesign,
        Command::RateTable,
        Command::TradeoffCurve,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Command::ProtocolSim => "protocol-sim",
            Command::GeometrySweep => "geometry-sweep",
            Command::GratingDesign => "grating-design",
            Command::RateTable => "rate-table",
            Command::TradeoffCurve => "tradeoff-curve",
        }
    }

    pub fn schema(self) -> &'static Schema {
        match self {
            Command::ProtocolSim => &PROTOCOL_SIM,
            Command::GeometrySweep => &GEOMETRY_SWEEP,
            Command::GratingDesign => &GRATING_DESIGN,
            Command::RateTable => &RATE_TABLE,
            Command::TradeoffCurve => &TRADEOFF_CURVE,
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Command::ALL.into_iter().find(|c| c.as_str() == s).ok_or_else(|| format!("unknown command {s:?}"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ParamKind {
    Number(Dimension),
    Integer,
    Bool,
    Choice(&'static [&'static str]),
}

impl ParamKind {
    pub fn sweepable(self) -> bool {
        matches!(self, ParamKind::Number(_) | ParamKind::Integer)
    }
}

impl fmt::Display for ParamKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamKind::Number(Dimension::Dimensionless) => f.write_str("number"),
            ParamKind::Number(d) => write!(f, "{d} [{}]", d.si_unit()),
            ParamKind::Integer => f.write_str("integer"),
            ParamKind::Bool => f.write_str("boolean"),
            ParamKind::Choice(options) => write!(f, "one of {}", options.join(" | ")),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ParamSpec {
    pub name: &'static str,
    pub kind: ParamKind,
    /// Default shown in the schema listing; `None` means required or
    /// derived.
    pub default: Option<&'static str>,
    pub help: &'static str,
}

const fn p(name: &'static str, kind: ParamKind, default: Option<&'static str>, help: &'static str) -> ParamSpec {
    ParamSpec { name, kind, default, help }
}

const DIMLESS: ParamKind = ParamKind::Number(Dimension::Dimensionless);
const LENGTH: ParamKind = ParamKind::Number(Dimension::Length);
const FREQ: ParamKind = ParamKind::Number(Dimension::Frequency);
const TIME: ParamKind = ParamKind::Number(Dimension::Time);
const DB: ParamKind = ParamKind::Number(Dimension::Decibel);

pub const KINDS: &[&str] = &["number", "time-bin", "polarization", "frequency"];
pub const SPECIES: &[&str] = &["Ca+", "Sr+", "Ba+", "Yb+"];
pub const DETECTORS: &[&str] = &["snspd", "spad"];

/// Parameters of a command, with nested tables for per-node overrides.
#[derive(Debug)]
pub struct Schema {
    pub params: &'static [ParamSpec],
    pub tables: &'static [(&'static str, &'static [ParamSpec])],
}

impl Schema {
    /// Looks up a dotted path such as `node1.transmission`.
    pub fn find(&self, path: &str) -> Option<&ParamSpec> {
        match path.split_once('.') {
            None => self.params.iter().find(|s| s.name == path),
            Some((table, key)) => self
                .tables
                .iter()
                .find(|(t, _)| *t == table)
                .and_then(|(_, specs)| specs.iter().find(|s| s.name == key)),
        }
    }

    pub fn table(&self, name: &str) -> Option<&'static [ParamSpec]> {
        self.tables.iter().find(|(t, _)| *t == name).map(|(_, s)| *s)
    }
}

const NODE: &[ParamSpec] = &[
    p("excitation_prob", DIMLESS, None, "excitation probability p_e"),
    p("branching", DIMLESS, None, "branching ratio γ"),
    p("solid_angle_fraction", DIMLESS, None, "collected solid-angle fraction Ω/4π"),
    p("transmission", DIMLESS, None, "transmission to the detector"),
];

const PROTOCOL_PARAMS: &[ParamSpec] = &[
    p("kind", ParamKind::Choice(KINDS), Some("number"), "entanglement protocol"),
    p("excitation_prob", DIMLESS, Some("0.05"), "excitation probability p_e, both nodes"),
    p("branching", DIMLESS, Some("1"), "branching ratio γ, both nodes"),
    p("solid_angle_fraction", DIMLESS, Some("0.1"), "collected solid-angle fraction, both nodes"),
    p("transmission", DIMLESS, Some("0.1"), "transmission to the detector, both nodes"),
    p("detector_efficiency", DIMLESS, Some("1"), "detector efficiency η_D"),
    p("detector", ParamKind::Choice(DETECTORS), None, "detector preset, sets detector_efficiency"),
    p("species", ParamKind::Choice(SPECIES), None, "ion species preset, sets wavelength and splitting"),
    p("isotope", ParamKind::Integer, None, "isotope mass number for the species splitting"),
    p("wavelength", LENGTH, Some("493 nm"), "photon wavelength λ0"),
    p("splitting", FREQ, Some("10 GHz"), "qubit frequency splitting Δν"),
    p("path_length_difference", LENGTH, Some("0 m"), "static path-length difference Δl"),
    p("mode_overlap", DIMLESS, Some("1"), "photon mode overlap M"),
    p("splitter_transmissivity", DIMLESS, Some("0.5"), "analyzer beamsplitter transmissivity T"),
    p("crosstalk", DB, Some("-inf dB"), "polarization cross-talk"),
    p("enhanced_analyzer", ParamKind::Bool, Some("true"), "resolve both Ψ⁺ and Ψ⁻"),
    p("bin_separation", TIME, Some("100 ns"), "time-bin separation Δt"),
    p("lifetime", TIME, Some("8 ns"), "excited-state lifetime τ"),
    p("qubit_frequency_mismatch", FREQ, Some("0 Hz"), "qubit frequency mismatch Δω/2π"),
    p("temperature_factor", DIMLESS, Some("1"), "motional fidelity factor (number protocol)"),
    p("path_jitter", LENGTH, Some("0 m"), "RMS path-length fluctuation σ_l"),
    p("jitter_samples", ParamKind::Integer, Some("1000"), "Monte Carlo samples for path jitter"),
];

pub static PROTOCOL_SIM: Schema = Schema { params: PROTOCOL_PARAMS, tables: &[("node0", NODE), ("node1", NODE)] };

pub static GEOMETRY_SWEEP: Schema = Schema {
    params: &[
        p("a", LENGTH, None, "RF gap and grating width"),
        p("b", LENGTH, None, "RF rail width; derived from a and h when absent"),
        p("h", LENGTH, None, "ion height; derived from a and b when absent"),
        p("l", LENGTH, None, "grating length along the axis"),
        p("monte_carlo_samples", ParamKind::Integer, Some("0"), "Monte Carlo cross-check samples, 0 to skip"),
    ],
    tables: &[],
};

pub static GRATING_DESIGN: Schema = Schema {
    params: &[
        p("wavelength", LENGTH, Some("493 nm"), "free-space wavelength λ0"),
        p("n_eff", DIMLESS, Some("1.6"), "grating effective index"),
        p("ion_height", LENGTH, Some("50 um"), "ion-to-grating distance"),
        p("ion_x", LENGTH, Some("0 m"), "ion position along the grating"),
        p("span_start", LENGTH, None, "grating start"),
        p("span_stop", LENGTH, None, "grating end"),
        p("min_pitch", LENGTH, Some("240 nm"), "fabrication floor"),
        p("order", ParamKind::Integer, Some("1"), "diffraction order"),
    ],
    tables: &[],
};

pub static RATE_TABLE: Schema = Schema {
    params: &[
        p("excitation_prob", DIMLESS, Some("0.05"), "excitation probability for the number protocol"),
        p("two_photon_excitation_prob", DIMLESS, Some("1"), "excitation probability for two-photon protocols"),
        p("branching", DIMLESS, Some("1"), "branching ratio γ"),
        p("solid_angle_fraction", DIMLESS, Some("0.1"), "collected solid-angle fraction"),
        p("transmission", DIMLESS, Some("0.1"), "transmission to the detector"),
        p("detector_efficiency", DIMLESS, Some("1"), "detector efficiency η_D"),
        p("detector", ParamKind::Choice(DETECTORS), None, "detector preset"),
        p("species", ParamKind::Choice(SPECIES), None, "ion species preset"),
        p("isotope", ParamKind::Integer, None, "isotope mass number"),
        p("wavelength", LENGTH, Some("493 nm"), "photon wavelength λ0"),
        p("splitting", FREQ, Some("10 GHz"), "qubit frequency splitting Δν"),
        p("attempt_rate", FREQ, Some("1 MHz"), "attempt rate per site"),
        p("sites", ParamKind::Integer, Some("1"), "parallel trap sites"),
        p("path_jitter", LENGTH, Some("0 m"), "RMS path-length fluctuation σ_l"),
        p("jitter_samples", ParamKind::Integer, Some("1000"), "Monte Carlo samples for path jitter"),
    ],
    tables: &[],
};

pub static TRADEOFF_CURVE: Schema = Schema {
    params: &[
        p("a", LENGTH, None, "RF gap; defaults to 99 points spanning (0, 2h)"),
        p("h", LENGTH, Some("50 um"), "ion height"),
        p("l", LENGTH, Some("100 um"), "grating length; inf for an infinite strip"),
    ],
    tables: &[],
};

/// Plain-text listing of a command's schema.
pub fn describe(command: Command) -> String {
    let schema = command.schema();
    let mut out = format!("[parameters] for {command}\n");
    let line = |prefix: &str, s: &ParamSpec| {
        let default = s.default.map(|d| format!(" (default {d})")).unwrap_or_default();
        format!("  {prefix}{:<28} {}{default}: {}\n", s.name, s.kind, s.help)
    };
    for s in schema.params {
        out.push_str(&line("", s));
    }
    for (table, specs) in schema.tables {
        for s in *specs {
            out.push_str(&line(&format!("{table}."), s));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dotted_lookup() {
        let s = Command::ProtocolSim.schema();
        assert!(s.find("node1.transmission").is_some());
        assert!(s.find("node2.transmission").is_none());
        assert!(s.find("kind").is_some());
        assert!(Command::GeometrySweep.schema().find("node0.a").is_none());
    }

    #[test]
    fn command_names_round_trip() {
        for c in Command::ALL {
            assert_eq!(c.as_str().parse::<Command>().unwrap(), c);
        }
        assert!("protocol".parse::<Command>().is_err());
    }

    #[test]
    fn listing_mentions_every_parameter() {
        for c in Command::ALL {
            let text = describe(c);
            for s in c.schema().params {
                assert!(text.contains(s.name));
            }
        }
    }
}

//! Quantities with unit suffixes, normalized to SI at parse time.

use std::fmt;

/// Physical dimension of a numeric parameter. Bare numbers are taken in
/// the SI base unit (decibels for [`Dimension::Decibel`]).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dimension {
    Dimensionless,
    Length,
    Frequency,
    Time,
    Decibel,
}

impl Dimension {
    pub fn si_unit(self) -> &'static str {
        match self {
            Dimension::Dimensionless => "",
            Dimension::Length => "m",
            Dimension::Frequency => "Hz",
            Dimension::Time => "s",
            Dimension::Decibel => "dB",
        }
    }

    /// Power of ten taking `unit` to the SI base unit.
    fn exponent(self, unit: &str) -> Option<i32> {
        let table: &[(&str, i32)] = match self {
            Dimension::Dimensionless => &[],
            Dimension::Length => {
                &[("m", 0), ("cm", -2), ("mm", -3), ("um", -6), ("µm", -6), ("μm", -6), ("nm", -9), ("pm", -12)]
            }
            Dimension::Frequency => &[("Hz", 0), ("kHz", 3), ("MHz", 6), ("GHz", 9), ("THz", 12)],
            Dimension::Time => &[("s", 0), ("ms", -3), ("us", -6), ("µs", -6), ("μs", -6), ("ns", -9), ("ps", -12)],
            Dimension::Decibel => &[("dB", 0)],
        };
        table.iter().find(|(u, _)| *u == unit).map(|(_, s)| *s)
    }

    /// Accepted suffixes, for diagnostics.
    pub fn units(self) -> &'static str {
        match self {
            Dimension::Dimensionless => "none",
            Dimension::Length => "m, cm, mm, um/µm, nm, pm",
            Dimension::Frequency => "Hz, kHz, MHz, GHz, THz",
            Dimension::Time => "s, ms, us/µs, ns, ps",
            Dimension::Decibel => "dB",
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Dimension::Dimensionless => "dimensionless",
            Dimension::Length => "length",
            Dimension::Frequency => "frequency",
            Dimension::Time => "time",
            Dimension::Decibel => "decibels",
        };
        f.write_str(name)
    }
}

fn is_unit_char(c: char) -> bool {
    c.is_alphabetic() || c == 'µ' || c == 'μ'
}

/// Parses `"62 um"`, `"10GHz"` or `"-inf dB"` into SI. A string without
/// a suffix must itself be a number.
pub fn parse_quantity(text: &str, dim: Dimension) -> Result<f64, String> {
    let text = text.trim();
    if let Ok(v) = text.parse::<f64>() {
        return Ok(v);
    }
    let split = text
        .char_indices()
        .rev()
        .take_while(|&(_, c)| is_unit_char(c))
        .last()
        .map(|(i, _)| i)
        .ok_or_else(|| format!("cannot read {text:?} as a number"))?;
    let (num, unit) = text.split_at(split);
    let value: f64 = num.trim().parse().map_err(|_| format!("cannot read {:?} as a number", num.trim()))?;
    match dim.exponent(unit) {
        // Dividing by an exact power of ten rounds once, so "10 um" is 1e-5.
        Some(e) if e < 0 => Ok(value / 10f64.powi(-e)),
        Some(e) => Ok(value * 10f64.powi(e)),
        None if dim == Dimension::Dimensionless => Err(format!("unexpected unit {unit:?} on a dimensionless value")),
        None => Err(format!("unknown {dim} unit {unit:?} (expected {})", dim.units())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suffixes_normalize_to_si() {
        assert_eq!(parse_quantity("62 um", Dimension::Length).unwrap(), 62e-6);
        assert_eq!(parse_quantity("62µm", Dimension::Length).unwrap(), 62e-6);
        assert_eq!(parse_quantity("493 nm", Dimension::Length).unwrap(), 493e-9);
        assert_eq!(parse_quantity("10 GHz", Dimension::Frequency).unwrap(), 10e9);
        assert_eq!(parse_quantity("8 ns", Dimension::Time).unwrap(), 8e-9);
        assert_eq!(parse_quantity("-22 dB", Dimension::Decibel).unwrap(), -22.0);
        assert_eq!(parse_quantity("1e-3 m", Dimension::Length).unwrap(), 1e-3);
        assert_eq!(parse_quantity("0.25", Dimension::Dimensionless).unwrap(), 0.25);
        assert!(parse_quantity("inf", Dimension::Length).unwrap().is_infinite());
        assert!(parse_quantity("-inf dB", Dimension::Decibel).unwrap().is_infinite());
    }

    #[test]
    fn bad_units_are_reported() {
        assert!(parse_quantity("5 GHz", Dimension::Length).unwrap_err().contains("length unit"));
        assert!(parse_quantity("5 um", Dimension::Dimensionless).is_err());
        assert!(parse_quantity("abc", Dimension::Length).is_err());
        assert!(parse_quantity("", Dimension::Time).is_err());
    }
}

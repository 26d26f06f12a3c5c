//! Per-command domain checks and evaluation.

use std::f64::consts::PI;

use pme_core::emission::{collected_fraction, crosstalk_amplitude, DipoleKind, DipoleTransition};
use pme_core::grating::{fabrication_lint, tooth_positions, GratingSpec};
use pme_core::protocols::{
    analytic_herald_prob, multiplexed_rate, phase_jitter_fidelity, run_protocol, DetectorPreset, ProtocolError,
    SpeciesPreset,
};
use pme_core::trap::{
    exposure_strength_tradeoff, ion_height, rf_width_for_height, solid_angle_fraction, solid_angle_monte_carlo,
    MIN_MC_SAMPLES,
};
use pme_core::{ApertureSpec, Error, ProtocolConfig, ProtocolKind};
use rayon::prelude::*;
use serde_json::json;

use crate::output::{Cell, Report, Table};
use crate::scenario::{Axis, Diagnostic, Params, Scenario};
use crate::schema::Command;
use crate::CliError;

fn to_um(x: f64) -> f64 {
    x * 1e6
}

fn to_nm(x: f64) -> f64 {
    x * 1e9
}

/// Domain checks beyond the schema, over every grid point.
pub fn check(scenario: &Scenario) -> Vec<Diagnostic> {
    let mut diags: Vec<Diagnostic> = Vec::new();
    let has_sweep = !scenario.axes.is_empty();
    if scenario.command == Command::GratingDesign && has_sweep {
        diags.push(Diagnostic::new("sweep", "grating-design does not take a sweep"));
    }
    for point in scenario.points() {
        let found = match scenario.command {
            Command::ProtocolSim => check_protocol(&point),
            Command::RateTable => check_rate_table(&point),
            Command::GeometrySweep => check_geometry(&point),
            Command::GratingDesign => check_grating(&point),
            Command::TradeoffCurve => check_tradeoff(&point),
        };
        for d in found {
            if !diags.contains(&d) {
                diags.push(d);
            }
        }
    }
    diags
}

/// Evaluates the scenario; grid points run in parallel and rows are
/// assembled in grid order.
pub fn run(scenario: &Scenario) -> Result<Report, CliError> {
    match scenario.command {
        Command::ProtocolSim => protocol_sim(scenario),
        Command::GeometrySweep => sweep_rows(scenario, geometry_columns(scenario), geometry_row),
        Command::GratingDesign => grating_design(scenario),
        Command::RateTable => rate_table(scenario),
        Command::TradeoffCurve => tradeoff_curve(scenario),
    }
}

fn axis_columns(scenario: &Scenario) -> Vec<String> {
    scenario.axes.iter().map(|a| a.parameter.clone()).collect()
}

fn axis_cells(scenario: &Scenario, point: &Params) -> Vec<Cell> {
    scenario.coordinates(point).into_iter().map(Cell::Float).collect()
}

fn point_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_add(index as u64)
}

fn sweep_rows(
    scenario: &Scenario,
    columns: Vec<String>,
    row: fn(&Scenario, &Params, u64) -> Result<Vec<Vec<Cell>>, Error>,
) -> Result<Report, CliError> {
    let points = scenario.points();
    let blocks: Vec<Vec<Vec<Cell>>> = points
        .par_iter()
        .enumerate()
        .map(|(i, p)| row(scenario, p, point_seed(scenario.seed, i)))
        .collect::<Result<_, _>>()?;
    Ok(Report::table(Table { columns, rows: blocks.into_iter().flatten().collect() }))
}

fn protocol_kind(name: &str) -> ProtocolKind {
    name.parse().unwrap_or(ProtocolKind::Number)
}

fn presets(p: &Params) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    if p.contains("detector") && p.contains("detector_efficiency") {
        diags.push(Diagnostic::new("parameters.detector", "give either detector or detector_efficiency"));
    }
    if let Some(species) = p.choice("species") {
        for key in ["wavelength", "splitting"] {
            if p.contains(key) {
                diags.push(Diagnostic::new(format!("parameters.{key}"), "conflicts with the species preset"));
            }
        }
        if let Some(iso) = p.integer("isotope") {
            let found =
                SpeciesPreset::find(species).and_then(|s| u16::try_from(iso).ok().and_then(|i| s.splitting_hz(i)));
            if found.is_none() {
                diags.push(Diagnostic::new("parameters.isotope", format!("no hyperfine preset for {iso}{species}")));
            }
        }
    } else if p.contains("isotope") {
        diags.push(Diagnostic::new("parameters.isotope", "needs a species"));
    }
    diags
}

/// Shared optical settings of protocol-sim and rate-table.
fn apply_common(p: &Params, c: &mut ProtocolConfig) {
    if let Some(species) = p.choice("species").and_then(SpeciesPreset::find) {
        c.wavelength = species.p_half_nm / 1e9;
        let iso = p.integer("isotope").and_then(|i| u16::try_from(i).ok());
        c.splitting = match iso {
            Some(i) => species.splitting_hz(i).unwrap_or(c.splitting),
            None => species.hyperfine[0].1 * 1e9,
        };
    }
    if let Some(d) = p.choice("detector").and_then(DetectorPreset::find) {
        c.detector_efficiency = d.efficiency;
    }
    c.detector_efficiency = p.number("detector_efficiency").unwrap_or(c.detector_efficiency);
    c.wavelength = p.number("wavelength").unwrap_or(c.wavelength);
    c.splitting = p.number("splitting").unwrap_or(c.splitting);
}

fn protocol_config(p: &Params) -> ProtocolConfig {
    let kind = protocol_kind(p.choice("kind").unwrap_or("number"));
    let mut c = ProtocolConfig::ideal(kind);
    apply_common(p, &mut c);
    for (i, node) in c.nodes.iter_mut().enumerate() {
        let get = |key: &str| p.number(&format!("node{i}.{key}")).or_else(|| p.number(key));
        node.excitation_prob = get("excitation_prob").unwrap_or(node.excitation_prob);
        node.branching = get("branching").unwrap_or(node.branching);
        node.solid_angle_fraction = get("solid_angle_fraction").unwrap_or(node.solid_angle_fraction);
        node.transmission = get("transmission").unwrap_or(node.transmission);
    }
    c.path_length_difference = p.number("path_length_difference").unwrap_or(c.path_length_difference);
    c.mode_overlap = p.number("mode_overlap").unwrap_or(c.mode_overlap);
    c.splitter_transmissivity = p.number("splitter_transmissivity").unwrap_or(c.splitter_transmissivity);
    c.crosstalk = p.number("crosstalk").map(crosstalk_amplitude).unwrap_or(c.crosstalk);
    c.enhanced_analyzer = p.boolean("enhanced_analyzer").unwrap_or(c.enhanced_analyzer);
    c.bin_separation = p.number("bin_separation").unwrap_or(c.bin_separation);
    c.lifetime = p.number("lifetime").unwrap_or(c.lifetime);
    c.qubit_frequency_mismatch =
        p.number("qubit_frequency_mismatch").map(|f| 2.0 * PI * f).unwrap_or(c.qubit_frequency_mismatch);
    c.temperature_factor = p.number("temperature_factor").unwrap_or(c.temperature_factor);
    c
}

fn protocol_diagnostic(e: ProtocolError) -> Diagnostic {
    match e {
        ProtocolError::BinsOverlap { .. } => Diagnostic::new(
            "parameters.bin_separation",
            format!("{e}; the early and late photons must be separated in time by more than the lifetime"),
        ),
        other => Diagnostic::new("parameters", other.to_string()),
    }
}

fn jitter_diagnostics(p: &Params) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    if p.number("path_jitter").is_some_and(|s| !(s >= 0.0 && s.is_finite())) {
        diags.push(Diagnostic::new("parameters.path_jitter", "must be finite and non-negative"));
    }
    if p.integer("jitter_samples").is_some_and(|n| n < 1) {
        diags.push(Diagnostic::new("parameters.jitter_samples", "must be at least 1"));
    }
    diags
}

fn check_protocol(p: &Params) -> Vec<Diagnostic> {
    let mut diags = presets(p);
    diags.extend(jitter_diagnostics(p));
    if let Err(e) = protocol_config(p).validate() {
        diags.push(protocol_diagnostic(e));
    }
    diags
}

fn jitter(p: &Params) -> Option<(f64, usize)> {
    let sigma = p.number("path_jitter").unwrap_or(0.0);
    let samples = p.integer("jitter_samples").unwrap_or(1000) as usize;
    (sigma > 0.0).then_some((sigma, samples))
}

fn protocol_sim(scenario: &Scenario) -> Result<Report, CliError> {
    if scenario.axes.is_empty() {
        return protocol_single(scenario);
    }
    let mut columns = axis_columns(scenario);
    columns.extend(["total_success", "analytic_herald_prob", "heralded_fidelity"].map(String::from));
    if jitter(&scenario.params).is_some() || scenario.axes.iter().any(|a| a.parameter == "path_jitter") {
        columns.push("jitter_fidelity".into());
    }
    let with_jitter = columns.last().is_some_and(|c| c == "jitter_fidelity");
    let points = scenario.points();
    let rows: Vec<Vec<Cell>> = points
        .par_iter()
        .enumerate()
        .map(|(i, p)| -> Result<Vec<Cell>, Error> {
            let config = protocol_config(p);
            let table = run_protocol(&config)?;
            let mut row = axis_cells(scenario, p);
            row.push(Cell::Float(table.total_success));
            row.push(Cell::Float(analytic_herald_prob(&config)));
            row.push(Cell::opt(table.heralded_fidelity()));
            if with_jitter {
                let (sigma, n) = jitter(p).unwrap_or((0.0, 0));
                let j = phase_jitter_fidelity(&config, sigma, n, point_seed(scenario.seed, i))?;
                row.push(Cell::Float(j.mean_fidelity));
            }
            Ok(row)
        })
        .collect::<Result<_, _>>()?;
    Ok(Report::table(Table { columns, rows }))
}

fn protocol_single(scenario: &Scenario) -> Result<Report, CliError> {
    let config = protocol_config(&scenario.params);
    let table = run_protocol(&config).map_err(Error::from)?;
    let columns = ["pattern", "clicked", "probability", "valid", "target", "correction_phase", "fidelity"]
        .map(String::from)
        .to_vec();
    let rows = table
        .entries
        .iter()
        .map(|e| {
            let clicked = table.clicked(e.pattern);
            vec![
                Cell::Int(e.pattern as i64),
                Cell::Text(if clicked.is_empty() { "none".into() } else { clicked.join("+") }),
                Cell::Float(e.probability),
                Cell::Bool(e.valid),
                e.target.map(|t| Cell::Text(t.as_str().into())).unwrap_or(Cell::Empty),
                Cell::opt(e.correction.map(|c| c.phase)),
                Cell::opt(e.fidelity),
            ]
        })
        .collect();
    let mut doc = serde_json::to_value(&table)?;
    doc["heralded_fidelity"] = json!(table.heralded_fidelity());
    doc["analytic_herald_prob"] = json!(analytic_herald_prob(&config));
    doc["config"] = serde_json::to_value(&config)?;
    if let Some((sigma, n)) = jitter(&scenario.params) {
        let j = phase_jitter_fidelity(&config, sigma, n, scenario.seed).map_err(Error::from)?;
        doc["jitter"] = serde_json::to_value(j)?;
    }
    Ok(Report { table: Table { columns, rows }, json: Some(doc), notes: Vec::new() })
}

const RATE_VARIANTS: [(ProtocolKind, bool); 6] = [
    (ProtocolKind::Number, true),
    (ProtocolKind::TimeBin, true),
    (ProtocolKind::Polarization, true),
    (ProtocolKind::Polarization, false),
    (ProtocolKind::Frequency, true),
    (ProtocolKind::Frequency, false),
];

fn rate_config(p: &Params, kind: ProtocolKind, enhanced: bool) -> ProtocolConfig {
    let mut c = ProtocolConfig::ideal(kind);
    apply_common(p, &mut c);
    let p_e = if kind == ProtocolKind::Number {
        p.number("excitation_prob").unwrap_or(0.05)
    } else {
        p.number("two_photon_excitation_prob").unwrap_or(1.0)
    };
    for node in &mut c.nodes {
        node.excitation_prob = p_e;
        node.branching = p.number("branching").unwrap_or(node.branching);
        node.solid_angle_fraction = p.number("solid_angle_fraction").unwrap_or(node.solid_angle_fraction);
        node.transmission = p.number("transmission").unwrap_or(node.transmission);
    }
    c.enhanced_analyzer = enhanced;
    c
}

fn check_rate_table(p: &Params) -> Vec<Diagnostic> {
    let mut diags = presets(p);
    diags.extend(jitter_diagnostics(p));
    if p.number("attempt_rate").is_some_and(|r| !(r >= 0.0 && r.is_finite())) {
        diags.push(Diagnostic::new("parameters.attempt_rate", "must be finite and non-negative"));
    }
    if p.integer("sites").is_some_and(|n| n < 1) {
        diags.push(Diagnostic::new("parameters.sites", "must be at least 1"));
    }
    for (kind, enhanced) in RATE_VARIANTS {
        if let Err(e) = rate_config(p, kind, enhanced).validate() {
            let d = protocol_diagnostic(e);
            if !diags.contains(&d) {
                diags.push(d);
            }
        }
    }
    diags
}

fn rate_table(scenario: &Scenario) -> Result<Report, CliError> {
    let mut columns = axis_columns(scenario);
    columns.extend(
        ["protocol", "analyzer", "analytic_herald_prob", "herald_prob", "heralded_fidelity", "rate_hz"]
            .map(String::from),
    );
    let with_jitter = jitter(&scenario.params).is_some() || scenario.axes.iter().any(|a| a.parameter == "path_jitter");
    if with_jitter {
        columns.push("jitter_fidelity".into());
    }
    let tasks: Vec<(usize, Params, usize)> = scenario
        .points()
        .into_iter()
        .enumerate()
        .flat_map(|(i, p)| (0..RATE_VARIANTS.len()).map(move |v| (i, p.clone(), v)))
        .collect();
    let rows: Vec<Vec<Cell>> = tasks
        .par_iter()
        .map(|(i, p, v)| -> Result<Vec<Cell>, Error> {
            let (kind, enhanced) = RATE_VARIANTS[*v];
            let config = rate_config(p, kind, enhanced);
            let table = run_protocol(&config)?;
            let analyzer = match kind {
                ProtocolKind::Number => "single-photon",
                ProtocolKind::TimeBin => "time-resolved",
                _ if enhanced => "enhanced",
                _ => "standard",
            };
            let rate = multiplexed_rate(
                p.number("attempt_rate").unwrap_or(1e6),
                table.total_success,
                p.integer("sites").unwrap_or(1) as usize,
            );
            let mut row = axis_cells(scenario, p);
            row.extend([
                Cell::Text(kind.as_str().into()),
                Cell::Text(analyzer.into()),
                Cell::Float(analytic_herald_prob(&config)),
                Cell::Float(table.total_success),
                Cell::opt(table.heralded_fidelity()),
                Cell::Float(rate),
            ]);
            if with_jitter {
                let (sigma, n) = jitter(p).unwrap_or((0.0, 0));
                let seed = point_seed(scenario.seed, i * RATE_VARIANTS.len() + v);
                row.push(Cell::Float(phase_jitter_fidelity(&config, sigma, n, seed)?.mean_fidelity));
            }
            Ok(row)
        })
        .collect::<Result<_, _>>()?;
    Ok(Report::table(Table { columns, rows }))
}

/// Lengths of one geometry point in µm: (a, b, h, l).
fn geometry_lengths(p: &Params) -> Result<(f64, f64, f64, f64), Error> {
    let a = to_um(p.number("a").unwrap_or(f64::NAN));
    let l = to_um(p.number("l").unwrap_or(f64::NAN));
    let (b, h) = match (p.number("b"), p.number("h")) {
        (Some(b), Some(h)) => (to_um(b), to_um(h)),
        (Some(b), None) => (to_um(b), ion_height(a, to_um(b))?),
        (None, Some(h)) => (rf_width_for_height(to_um(h), a)?, to_um(h)),
        (None, None) => (f64::NAN, f64::NAN),
    };
    Ok((a, b, h, l))
}

fn check_geometry(p: &Params) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    for key in ["a", "l"] {
        if !p.contains(key) {
            diags.push(Diagnostic::new(format!("parameters.{key}"), "required"));
        }
    }
    if !p.contains("b") && !p.contains("h") {
        diags.push(Diagnostic::new("parameters", "give b, h or both"));
    }
    if let Some(n) = p.integer("monte_carlo_samples") {
        if n != 0 && n < MIN_MC_SAMPLES as i64 {
            diags
                .push(Diagnostic::new("parameters.monte_carlo_samples", format!("use 0 or at least {MIN_MC_SAMPLES}")));
        }
    }
    if diags.is_empty() {
        match geometry_lengths(p) {
            Ok((a, _, h, l)) => {
                if let Err(e) = solid_angle_fraction(&ApertureSpec::new(l, a, h)) {
                    diags.push(Diagnostic::new("parameters", e.to_string()));
                }
            }
            Err(e) => diags.push(Diagnostic::new("parameters", e.to_string())),
        }
    }
    diags
}

fn geometry_columns(scenario: &Scenario) -> Vec<String> {
    let mut columns: Vec<String> =
        ["a_um", "b_um", "h_um", "l_um", "exposure", "collected_pi", "collected_sigma"].map(String::from).to_vec();
    if scenario.params.integer("monte_carlo_samples").unwrap_or(0) > 0 {
        columns.extend(["mc_exposure", "mc_stderr"].map(String::from));
    }
    columns
}

fn geometry_row(_: &Scenario, p: &Params, seed: u64) -> Result<Vec<Vec<Cell>>, Error> {
    let (a, b, h, l) = geometry_lengths(p)?;
    let ap = ApertureSpec::new(l, a, h);
    let exposure = solid_angle_fraction(&ap)?;
    let pi = collected_fraction(&DipoleTransition::new(DipoleKind::Pi), &ap)?;
    let sigma = collected_fraction(&DipoleTransition::new(DipoleKind::Sigma), &ap)?;
    let mut row: Vec<Cell> = [a, b, h, l, exposure, pi, sigma].into_iter().map(Cell::Float).collect();
    let samples = p.integer("monte_carlo_samples").unwrap_or(0) as usize;
    if samples > 0 {
        let (est, se) = solid_angle_monte_carlo(&ap, samples, seed)?;
        row.extend([Cell::Float(est), Cell::Float(se)]);
    }
    Ok(vec![row])
}

fn grating_spec(p: &Params) -> GratingSpec {
    let um = |key: &str, default: f64| p.number(key).map(to_um).unwrap_or(default);
    let mut spec = GratingSpec::new(
        p.number("wavelength").map(to_nm).unwrap_or(493.0),
        p.number("n_eff").unwrap_or(1.6),
        um("ion_height", 50.0),
        (um("span_start", f64::NAN), um("span_stop", f64::NAN)),
    );
    spec.ion_x = um("ion_x", 0.0);
    spec.min_pitch_nm = p.number("min_pitch").map(to_nm).unwrap_or(spec.min_pitch_nm);
    spec.order = p.integer("order").map(|o| o.clamp(0, u32::MAX as i64) as u32).unwrap_or(1);
    spec
}

fn check_grating(p: &Params) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    for key in ["span_start", "span_stop"] {
        if !p.contains(key) {
            diags.push(Diagnostic::new(format!("parameters.{key}"), "required"));
        }
    }
    if p.integer("order").is_some_and(|o| o < 1 || o > u32::MAX as i64) {
        diags.push(Diagnostic::new("parameters.order", "must be a positive integer"));
    }
    if diags.is_empty() {
        if let Err(e) = grating_spec(p).validate() {
            diags.push(Diagnostic::new("parameters", e.to_string()));
        }
    }
    diags
}

fn grating_design(scenario: &Scenario) -> Result<Report, CliError> {
    let spec = grating_spec(&scenario.params);
    let teeth = tooth_positions(&spec).map_err(Error::from)?;
    let violations = fabrication_lint(&teeth, spec.min_pitch_nm);
    let columns = ["index", "x_um", "pitch_nm", "angle_deg", "fabricable"].map(String::from).to_vec();
    let rows = teeth
        .iter()
        .map(|t| {
            vec![
                Cell::Int(t.index),
                Cell::Float(t.x_um),
                Cell::Float(t.pitch_nm),
                Cell::Float(t.angle_deg),
                Cell::Bool(t.fabricable),
            ]
        })
        .collect();
    let doc = json!({ "spec": spec, "teeth": teeth, "violations": violations });
    let mut report = Report { table: Table { columns, rows }, json: Some(doc), notes: Vec::new() };
    if !violations.is_empty() {
        report.notes.push(format!(
            "{} tooth gaps fall below the {} nm fabrication floor",
            violations.len(),
            spec.min_pitch_nm
        ));
    }
    Ok(report)
}

fn check_tradeoff(p: &Params) -> Vec<Diagnostic> {
    let h = p.number("h").unwrap_or(50e-6);
    let l = p.number("l").unwrap_or(100e-6);
    let mut diags = Vec::new();
    if !(h > 0.0 && h.is_finite()) {
        diags.push(Diagnostic::new("parameters.h", "must be positive"));
    }
    if !(l > 0.0) {
        diags.push(Diagnostic::new("parameters.l", "must be positive"));
    }
    if let Some(a) = p.number("a") {
        if !(a > 0.0 && a < 2.0 * h) {
            diags.push(Diagnostic::new("parameters.a", "the gap must lie in (0, 2h) on the fixed-height curve"));
        }
    }
    diags
}

fn default_gap_grid(h: f64) -> Vec<f64> {
    (1..100).map(|i| 2.0 * h * i as f64 / 100.0).collect()
}

fn tradeoff_curve(scenario: &Scenario) -> Result<Report, CliError> {
    let mut scenario = scenario.clone();
    if !scenario.params.contains("a") && !scenario.axes.iter().any(|a| a.parameter == "a") {
        let h = scenario.params.number("h").unwrap_or(50e-6);
        scenario.axes.push(Axis::new("a", default_gap_grid(h)));
    }
    let columns = ["a_um", "b_um", "omega_r_normalized", "exposure"].map(String::from).to_vec();
    sweep_rows(&scenario, columns, |_, p, _| {
        let h = to_um(p.number("h").unwrap_or(50e-6));
        let l = to_um(p.number("l").unwrap_or(100e-6));
        let a = to_um(p.number("a").unwrap_or(f64::NAN));
        let rows = exposure_strength_tradeoff(h, l, &[a])?;
        Ok(rows
            .into_iter()
            .map(|r| {
                vec![Cell::Float(r.a), Cell::Float(r.b), Cell::Float(r.omega_r_normalized), Cell::Float(r.exposure)]
            })
            .collect())
    })
}

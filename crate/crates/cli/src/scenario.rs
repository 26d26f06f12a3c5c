//! Scenario files: TOML parsing, schema walking and sweep grids.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use serde::Serialize;
use toml::{Table, Value as Toml};

use crate::schema::{Command, ParamKind, ParamSpec, Schema};
use crate::units::parse_quantity;

/// A schema problem located by its key path.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub path: String,
    pub message: String,
}

impl Diagnostic {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self { path: path.into(), message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            f.write_str(&self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Number(f64),
    Integer(i64),
    Bool(bool),
    Choice(&'static str),
}

/// Normalized parameters keyed by dotted path; numbers are SI.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Params(BTreeMap<String, Value>);

impl Params {
    pub fn set(&mut self, path: &str, value: Value) {
        self.0.insert(path.to_string(), value);
    }

    pub fn contains(&self, path: &str) -> bool {
        self.0.contains_key(path)
    }

    pub fn number(&self, path: &str) -> Option<f64> {
        match self.0.get(path)? {
            Value::Number(v) => Some(*v),
            Value::Integer(v) => Some(*v as f64),
            _ => None,
        }
    }

    pub fn integer(&self, path: &str) -> Option<i64> {
        match self.0.get(path)? {
            Value::Integer(v) => Some(*v),
            _ => None,
        }
    }

    pub fn boolean(&self, path: &str) -> Option<bool> {
        match self.0.get(path)? {
            Value::Bool(v) => Some(*v),
            _ => None,
        }
    }

    pub fn choice(&self, path: &str) -> Option<&'static str> {
        match self.0.get(path)? {
            Value::Choice(v) => Some(v),
            _ => None,
        }
    }
}

/// One sweep axis: a parameter path and its grid in SI units.
#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    pub parameter: String,
    pub grid: Vec<f64>,
    integer: bool,
}

impl Axis {
    pub fn new(parameter: &str, grid: Vec<f64>) -> Self {
        Self { parameter: parameter.to_string(), grid, integer: false }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format {other:?} (expected csv or json)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub command: Command,
    pub params: Params,
    pub axes: Vec<Axis>,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
}

impl Scenario {
    /// Number of grid points: the product of the axis lengths.
    pub fn grid_size(&self) -> usize {
        self.axes.iter().map(|a| a.grid.len()).product()
    }

    /// Parameter sets for every grid point, first axis outermost.
    pub fn points(&self) -> Vec<Params> {
        let n = self.grid_size();
        (0..n)
            .map(|mut idx| {
                let mut p = self.params.clone();
                for axis in self.axes.iter().rev() {
                    let v = axis.grid[idx % axis.grid.len()];
                    idx /= axis.grid.len();
                    let value = if axis.integer { Value::Integer(v as i64) } else { Value::Number(v) };
                    p.set(&axis.parameter, value);
                }
                p
            })
            .collect()
    }

    /// Values of each axis at a grid point.
    pub fn coordinates(&self, point: &Params) -> Vec<f64> {
        self.axes.iter().map(|a| point.number(&a.parameter).unwrap_or(f64::NAN)).collect()
    }
}

const TOP_LEVEL: &[&str] = &["command", "seed", "parameters", "sweep", "output"];

fn type_name(v: &Toml) -> &'static str {
    match v {
        Toml::String(_) => "string",
        Toml::Integer(_) => "integer",
        Toml::Float(_) => "float",
        Toml::Boolean(_) => "boolean",
        Toml::Datetime(_) => "datetime",
        Toml::Array(_) => "array",
        Toml::Table(_) => "table",
    }
}

fn parse_value(spec: &ParamSpec, v: &Toml) -> Result<Value, String> {
    match (spec.kind, v) {
        (ParamKind::Number(_), Toml::Integer(i)) => Ok(Value::Number(*i as f64)),
        (ParamKind::Number(_), Toml::Float(x)) => Ok(Value::Number(*x)),
        (ParamKind::Number(dim), Toml::String(s)) => parse_quantity(s, dim).map(Value::Number),
        (ParamKind::Integer, Toml::Integer(i)) => Ok(Value::Integer(*i)),
        (ParamKind::Bool, Toml::Boolean(b)) => Ok(Value::Bool(*b)),
        (ParamKind::Choice(options), Toml::String(s)) => options
            .iter()
            .find(|o| o.eq_ignore_ascii_case(s))
            .map(|o| Value::Choice(o))
            .ok_or_else(|| format!("{s:?} is not one of {}", options.join(", "))),
        (kind, other) => Err(format!("expected {kind}, found {}", type_name(other))),
    }
}

fn walk_parameters(schema: &Schema, table: &Table, diags: &mut Vec<Diagnostic>) -> Params {
    let mut params = Params::default();
    for (key, value) in table {
        let path = format!("parameters.{key}");
        if let Toml::Table(inner) = value {
            let Some(specs) = schema.table(key) else {
                diags.push(Diagnostic::new(path, "unknown table"));
                continue;
            };
            for (k, v) in inner {
                let sub = format!("{path}.{k}");
                match specs.iter().find(|s| s.name == k) {
                    None => diags.push(Diagnostic::new(sub, "unknown key")),
                    Some(spec) => match parse_value(spec, v) {
                        Ok(val) => params.set(&format!("{key}.{k}"), val),
                        Err(e) => diags.push(Diagnostic::new(sub, e)),
                    },
                }
            }
            continue;
        }
        match schema.params.iter().find(|s| s.name == key) {
            None => diags.push(Diagnostic::new(path, "unknown key")),
            Some(spec) => match parse_value(spec, value) {
                Ok(val) => params.set(key, val),
                Err(e) => diags.push(Diagnostic::new(path, e)),
            },
        }
    }
    params
}

fn axis_number(spec: &ParamSpec, v: &Toml) -> Result<f64, String> {
    match parse_value(spec, v)? {
        Value::Number(x) => Ok(x),
        Value::Integer(i) => Ok(i as f64),
        _ => Err(format!("expected {}", spec.kind)),
    }
}

fn parse_axis(schema: &Schema, table: &Table, path: &str, diags: &mut Vec<Diagnostic>) -> Option<Axis> {
    let before = diags.len();
    for key in table.keys() {
        if !["parameter", "values", "start", "stop", "points", "spacing"].contains(&key.as_str()) {
            diags.push(Diagnostic::new(format!("{path}.{key}"), "unknown key"));
        }
    }
    let Some(Toml::String(name)) = table.get("parameter") else {
        diags.push(Diagnostic::new(format!("{path}.parameter"), "missing parameter name"));
        return None;
    };
    let spec = match schema.find(name) {
        Some(s) if s.kind.sweepable() => s,
        Some(s) => {
            diags.push(Diagnostic::new(format!("{path}.parameter"), format!("{name} ({}) cannot be swept", s.kind)));
            return None;
        }
        None => {
            diags.push(Diagnostic::new(format!("{path}.parameter"), format!("unknown parameter {name:?}")));
            return None;
        }
    };
    let integer = spec.kind == ParamKind::Integer;
    let grid = match (table.get("values"), table.get("start"), table.get("stop"), table.get("points")) {
        (Some(Toml::Array(values)), None, None, None) => values
            .iter()
            .enumerate()
            .filter_map(|(i, v)| {
                axis_number(spec, v).map_err(|e| diags.push(Diagnostic::new(format!("{path}.values[{i}]"), e))).ok()
            })
            .collect(),
        (None, Some(start), Some(stop), Some(points)) => {
            let start = axis_number(spec, start).map_err(|e| diags.push(Diagnostic::new(format!("{path}.start"), e)));
            let stop = axis_number(spec, stop).map_err(|e| diags.push(Diagnostic::new(format!("{path}.stop"), e)));
            let points = match points {
                Toml::Integer(n) if *n >= 1 => Ok(*n as usize),
                _ => Err(diags.push(Diagnostic::new(format!("{path}.points"), "expected a positive integer"))),
            };
            let log = match table.get("spacing") {
                None => Ok(false),
                Some(Toml::String(s)) if s == "linear" => Ok(false),
                Some(Toml::String(s)) if s == "log" => Ok(true),
                Some(_) => {
                    Err(diags.push(Diagnostic::new(format!("{path}.spacing"), "expected \"linear\" or \"log\"")))
                }
            };
            match (start, stop, points, log) {
                (Ok(a), Ok(b), Ok(n), Ok(log)) => {
                    if log && !(a > 0.0 && b > 0.0) {
                        diags.push(Diagnostic::new(path.to_string(), "log spacing needs positive start and stop"));
                        Vec::new()
                    } else {
                        linspace(a, b, n, log)
                    }
                }
                _ => Vec::new(),
            }
        }
        _ => {
            diags.push(Diagnostic::new(path.to_string(), "give either values or start, stop and points"));
            Vec::new()
        }
    };
    if diags.len() == before && grid.is_empty() {
        diags.push(Diagnostic::new(path.to_string(), "empty grid"));
    }
    if integer && grid.iter().any(|v| v.fract() != 0.0) {
        diags.push(Diagnostic::new(path.to_string(), format!("{name} takes integer values")));
    }
    (diags.len() == before).then(|| Axis { parameter: name.clone(), grid, integer })
}

fn linspace(a: f64, b: f64, n: usize, log: bool) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n)
        .map(|i| {
            let t = i as f64 / (n - 1) as f64;
            if log {
                (a.ln() + t * (b.ln() - a.ln())).exp()
            } else if i == n - 1 {
                b
            } else {
                a + t * (b - a)
            }
        })
        .collect()
}

/// Parses a scenario. `expected` is the command named on the command
/// line; a `command` key in the file must agree with it.
pub fn parse(text: &str, expected: Option<Command>) -> Result<Scenario, Vec<Diagnostic>> {
    let doc: Table =
        text.parse().map_err(|e: toml::de::Error| vec![Diagnostic::new("", e.message().trim().to_string())])?;
    let mut diags = Vec::new();
    for key in doc.keys() {
        if !TOP_LEVEL.contains(&key.as_str()) {
            diags.push(Diagnostic::new(key.clone(), "unknown key"));
        }
    }
    let command = match (doc.get("command"), expected) {
        (None, Some(c)) => Some(c),
        (None, None) => {
            diags.push(Diagnostic::new("command", "missing command"));
            None
        }
        (Some(Toml::String(s)), expected) => match s.parse::<Command>() {
            Ok(c) if expected.is_some_and(|e| e != c) => {
                diags.push(Diagnostic::new("command", format!("file is for {c}, not {}", expected.unwrap())));
                None
            }
            Ok(c) => Some(c),
            Err(e) => {
                diags.push(Diagnostic::new("command", e));
                None
            }
        },
        (Some(v), _) => {
            diags.push(Diagnostic::new("command", format!("expected string, found {}", type_name(v))));
            None
        }
    };
    let seed = match doc.get("seed") {
        None => 0,
        Some(Toml::Integer(s)) if *s >= 0 => *s as u64,
        Some(_) => {
            diags.push(Diagnostic::new("seed", "expected a non-negative integer"));
            0
        }
    };
    let (mut output, mut format) = (None, None);
    match doc.get("output") {
        None => {}
        Some(Toml::Table(t)) => {
            for (k, v) in t {
                match (k.as_str(), v) {
                    ("path", Toml::String(s)) => output = Some(PathBuf::from(s)),
                    ("format", Toml::String(s)) => match s.parse() {
                        Ok(f) => format = Some(f),
                        Err(e) => diags.push(Diagnostic::new("output.format", e)),
                    },
                    ("path" | "format", v) => diags.push(Diagnostic::new(
                        format!("output.{k}"),
                        format!("expected string, found {}", type_name(v)),
                    )),
                    _ => diags.push(Diagnostic::new(format!("output.{k}"), "unknown key")),
                }
            }
        }
        Some(v) => diags.push(Diagnostic::new("output", format!("expected table, found {}", type_name(v)))),
    }
    let Some(command) = command else {
        return Err(diags);
    };
    let schema = command.schema();
    let params = match doc.get("parameters") {
        None => Params::default(),
        Some(Toml::Table(t)) => walk_parameters(schema, t, &mut diags),
        Some(v) => {
            diags.push(Diagnostic::new("parameters", format!("expected table, found {}", type_name(v))));
            Params::default()
        }
    };
    let axis_tables: Vec<(String, &Table)> = match doc.get("sweep") {
        None => Vec::new(),
        Some(Toml::Table(t)) => vec![("sweep".to_string(), t)],
        Some(Toml::Array(items)) => items
            .iter()
            .enumerate()
            .filter_map(|(i, v)| match v {
                Toml::Table(t) => Some((format!("sweep[{i}]"), t)),
                _ => {
                    diags.push(Diagnostic::new(format!("sweep[{i}]"), "expected table"));
                    None
                }
            })
            .collect(),
        Some(v) => {
            diags.push(Diagnostic::new("sweep", format!("expected table, found {}", type_name(v))));
            Vec::new()
        }
    };
    let mut axes: Vec<Axis> = Vec::new();
    for (path, t) in axis_tables {
        if let Some(axis) = parse_axis(schema, t, &path, &mut diags) {
            if axes.iter().any(|a| a.parameter == axis.parameter) {
                diags.push(Diagnostic::new(path, format!("{} is swept twice", axis.parameter)));
            } else {
                axes.push(axis);
            }
        }
    }
    if diags.is_empty() {
        Ok(Scenario { command, params, axes, seed, output, format })
    } else {
        Err(diags)
    }
}

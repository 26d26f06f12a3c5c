//! `pme`: scenario runner and sweep tool for `pme-core`.
//!
//! A scenario is a TOML file naming a command, its parameters, optional
//! sweep axes, a seed and an output target. Quantities take unit suffixes
//! (`"62 um"`, `"10 GHz"`, `"8 ns"`, `"-22 dB"`); bare numbers are SI.

pub mod commands;
pub mod output;
pub mod scenario;
pub mod schema;
pub mod units;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

pub use output::{Manifest, Report};
pub use scenario::{Diagnostic, Format, Scenario};
pub use schema::Command;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid scenario:\n{}", list(.0))]
    Schema(Vec<Diagnostic>),
    #[error("numerical failure: {0}")]
    Numeric(#[from] pme_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("encoding failure: {0}")]
    Encode(#[from] serde_json::Error),
}

fn list(diags: &[Diagnostic]) -> String {
    diags.iter().map(|d| format!("  {d}")).collect::<Vec<_>>().join("\n")
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Schema(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io { .. } | CliError::Encode(_) => 4,
        }
    }

    fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }
}

#[derive(Debug, Parser)]
#[command(name = "pme", version, about = "Photon-mediated entanglement scenarios and sweeps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Herald table of one protocol, or success and fidelity over a sweep.
    ProtocolSim(RunArgs),
    /// Exposure fraction and dipole collection over trap geometries.
    GeometrySweep(RunArgs),
    /// Chirped grating tooth table with fabrication flags.
    GratingDesign(RunArgs),
    /// Herald probability, fidelity and rate for every protocol.
    RateTable(RunArgs),
    /// Trap strength against exposure along the fixed-height curve.
    TradeoffCurve(RunArgs),
    /// Checks a scenario without running it.
    Validate(ValidateArgs),
    /// Lists the parameters each command accepts.
    Schema {
        /// Limit the listing to one command.
        command: Option<String>,
    },
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Scenario file (TOML).
    #[arg(long)]
    pub config: PathBuf,
    /// Output file; stdout when absent and the scenario names none.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format, csv or json.
    #[arg(long, value_parser = parse_format)]
    pub format: Option<Format>,
    /// Seed for Monte Carlo parts; overrides the scenario.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads for sweep points.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Scenario file (TOML).
    #[arg(long)]
    pub config: PathBuf,
    /// Command to check against when the file does not name one.
    #[arg(long)]
    pub command: Option<String>,
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse()
}

/// Schema diagnostics for a scenario file; empty iff a run would pass
/// the schema and domain checks. Only an unreadable file is an error.
pub fn validate(path: &Path, expected: Option<Command>) -> Result<Vec<Diagnostic>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Ok(match scenario::parse(&text, expected) {
        Ok(s) => commands::check(&s),
        Err(diags) => diags,
    })
}

/// Parses and checks a scenario, returning it with the raw file bytes.
pub fn load(path: &Path, command: Command) -> Result<(Scenario, Vec<u8>), CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| CliError::Schema(vec![Diagnostic::new("", "scenario file is not UTF-8")]))?;
    let scenario = scenario::parse(&text, Some(command)).map_err(CliError::Schema)?;
    let diags = commands::check(&scenario);
    if diags.is_empty() {
        Ok((scenario, bytes))
    } else {
        Err(CliError::Schema(diags))
    }
}

/// Where a run's output went.
#[derive(Debug)]
pub struct RunOutcome {
    pub report: Report,
    pub encoded: Vec<u8>,
    pub output: Option<PathBuf>,
    pub manifest: Option<Manifest>,
}

fn default_format(path: Option<&Path>) -> Format {
    match path.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
        Some("json") => Format::Json,
        _ => Format::Csv,
    }
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut name: OsString = out.file_name().map(OsString::from).unwrap_or_default();
    name.push(".manifest.json");
    out.with_file_name(name)
}

/// Runs one command. Output paths from the scenario resolve against the
/// scenario file's directory; `--out` resolves against the working
/// directory.
pub fn execute(command: Command, args: &RunArgs) -> Result<RunOutcome, CliError> {
    let (mut scenario, config_bytes) = load(&args.config, command)?;
    if let Some(seed) = args.seed {
        scenario.seed = seed;
    }
    let output = args
        .out
        .clone()
        .or_else(|| scenario.output.as_ref().map(|p| args.config.parent().unwrap_or(Path::new("")).join(p)));
    let format = args.format.or(scenario.format).unwrap_or_else(|| default_format(output.as_deref()));
    let report = match args.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::io(Path::new("thread pool"), std::io::Error::other(e)))?
            .install(|| commands::run(&scenario))?,
        None => commands::run(&scenario)?,
    };
    let encoded = report.encode(format).map_err(|e| CliError::io(output.as_deref().unwrap_or(Path::new("-")), e))?;
    let manifest = match &output {
        None => None,
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
            }
            fs::write(path, &encoded).map_err(|e| CliError::io(path, e))?;
            let manifest = Manifest {
                tool: "pme",
                version: env!("CARGO_PKG_VERSION"),
                command,
                config_sha256: output::sha256_hex(&config_bytes),
                seed: scenario.seed,
                format,
                output: path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(),
                output_sha256: output::sha256_hex(&encoded),
                grid_points: scenario.grid_size(),
                rows: report.table.rows.len(),
                columns: report.table.columns.clone(),
            };
            let mpath = manifest_path(path);
            let mut bytes = serde_json::to_vec_pretty(&manifest)?;
            bytes.push(b'\n');
            fs::write(&mpath, bytes).map_err(|e| CliError::io(&mpath, e))?;
            Some(manifest)
        }
    };
    Ok(RunOutcome { report, encoded, output, manifest })
}

fn report_error(e: &CliError) -> ExitCode {
    eprintln!("pme: {e}");
    ExitCode::from(e.exit_code())
}

/// Entry point shared by the binary and tests.
pub fn main_with<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (command, run_args) = match cli.command {
        Cmd::ProtocolSim(a) => (Command::ProtocolSim, a),
        Cmd::GeometrySweep(a) => (Command::GeometrySweep, a),
        Cmd::GratingDesign(a) => (Command::GratingDesign, a),
        Cmd::RateTable(a) => (Command::RateTable, a),
        Cmd::TradeoffCurve(a) => (Command::TradeoffCurve, a),
        Cmd::Validate(a) => return run_validate(&a),
        Cmd::Schema { command } => return print_schema(command.as_deref()),
    };
    match execute(command, &run_args) {
        Ok(outcome) => {
            for note in &outcome.report.notes {
                eprintln!("pme: {note}");
            }
            if outcome.output.is_none() {
                let mut stdout = std::io::stdout().lock();
                if let Err(e) = stdout.write_all(&outcome.encoded).and_then(|_| stdout.flush()) {
                    return report_error(&CliError::io(Path::new("stdout"), e));
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => report_error(&e),
    }
}

fn run_validate(args: &ValidateArgs) -> ExitCode {
    let expected = match args.command.as_deref().map(str::parse::<Command>).transpose() {
        Ok(c) => c,
        Err(e) => return report_error(&CliError::Schema(vec![Diagnostic::new("--command", e)])),
    };
    match validate(&args.config, expected) {
        Ok(diags) if diags.is_empty() => {
            println!("{}: ok", args.config.display());
            ExitCode::SUCCESS
        }
        Ok(diags) => {
            for d in &diags {
                println!("{d}");
            }
            ExitCode::from(2)
        }
        Err(e) => report_error(&e),
    }
}

fn print_schema(command: Option<&str>) -> ExitCode {
    let commands = match command.map(str::parse::<Command>).transpose() {
        Ok(Some(c)) => vec![c],
        Ok(None) => Command::ALL.to_vec(),
        Err(e) => return report_error(&CliError::Schema(vec![Diagnostic::new("command", e)])),
    };
    for c in commands {
        println!("{}", schema::describe(c));
    }
    ExitCode::SUCCESS
}

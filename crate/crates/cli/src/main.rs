//! `chenobs`: command-line front end.
//!
//! Exit codes: 0 success, 1 mathematical validation failure (the report is
//! still printed), 2 malformed input.

mod commands;
mod render;

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use chen_obstruction::io::SCHEMA_VERSION;
use chen_obstruction::Error;

#[derive(Parser, Debug)]
#[command(name = "chenobs", version, about = "Derivation homology, Chen differentials and obstruction classes")]
struct Cli {
    /// Print the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Weight truncation N (default 4).
    #[arg(long, global = true, value_name = "N")]
    trunc: Option<usize>,
    /// Seed for randomized subcommands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Add wall-clock time to the report (makes output nondeterministic).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dimension of a weight component of a free graded Lie algebra.
    LieDim {
        /// Generator counts and degrees, e.g. `2x0` or `2x0,1x1`.
        #[arg(long)]
        gens: String,
        #[arg(long)]
        weight: usize,
        /// Restrict to one homological degree.
        #[arg(long, allow_hyphen_values = true)]
        degree: Option<i64>,
    },
    /// Homology of the derivation complex of a Chen differential.
    Homology {
        /// Derivation descriptor of δ (file, or `-` / omitted for stdin).
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        degree: i64,
        /// A single weight instead of the stable window.
        #[arg(long)]
        weight: Option<usize>,
    },
    /// Truncated BCH product of two weight-raising derivations.
    Bch { input: Option<PathBuf> },
    /// Check the C-infinity relations of a minimal structure.
    CinftyCheck { input: Option<PathBuf> },
    /// The Chen differential dual to a C-infinity structure.
    DeltaFromCinfty { input: Option<PathBuf> },
    /// Maurer-Cartan check of a formal connection.
    McCheck { input: Option<PathBuf> },
    /// Homology of the twisted complex of the canonical connection.
    TwistedHomology {
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        degree: i64,
    },
    /// Cohomology of a finite simplicial set with local coefficients.
    Cohomology { input: Option<PathBuf> },
    /// Reduce an obstruction cocycle (abelian or filtered coefficients).
    Obstruction { input: Option<PathBuf> },
    /// The sphere example, including the numeric integral.
    Sphere {
        #[arg(long, default_value_t = 1e-10)]
        tolerance: f64,
    },
    /// The genus-g surface model: dimension of H_0^1 and the wedge identification.
    Surface {
        #[arg(long, default_value_t = 2)]
        genus: usize,
        /// Number of random transvections used for the equivariance check.
        #[arg(long, default_value_t = 5)]
        checks: usize,
    },
    /// First Johnson class of automorphisms of the surface model.
    Tau1 {
        /// Automorphism descriptor; random monodromies when omitted.
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        genus: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Obstruction class of a mapping torus, compared with -τ_1.
    MappingTorus {
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        genus: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::LieDim { .. } => "lie-dim",
            Command::Homology { .. } => "homology",
            Command::Bch { .. } => "bch",
            Command::CinftyCheck { .. } => "cinfty-check",
            Command::DeltaFromCinfty { .. } => "delta-from-cinfty",
            Command::McCheck { .. } => "mc-check",
            Command::TwistedHomology { .. } => "twisted-homology",
            Command::Cohomology { .. } => "cohomology",
            Command::Obstruction { .. } => "obstruction",
            Command::Sphere { .. } => "sphere",
            Command::Surface { .. } => "surface",
            Command::Tau1 { .. } => "tau1",
            Command::MappingTorus { .. } => "mapping-torus",
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Exit 2.
    Input { path: String, message: String },
    /// Exit 1.
    Math(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Descriptor { path, message } => CliError::Input { path, message },
            e => CliError::Math(e),
        }
    }
}

/// A report and whether every check in it passed.
pub struct Outcome {
    pub report: Value,
    pub passed: bool,
}

impl Outcome {
    pub fn new<T: Serialize>(report: &T, passed: bool) -> Self {
        Outcome { report: serde_json::to_value(report).expect("reports serialize"), passed }
    }
}

pub fn read_input(path: Option<&PathBuf>) -> Result<String, CliError> {
    let mut s = String::new();
    let res = match path {
        Some(p) if p.as_os_str() != "-" => std::fs::File::open(p).and_then(|mut f| f.read_to_string(&mut s)),
        _ => std::io::stdin().read_to_string(&mut s),
    };
    res.map_err(|e| CliError::Input { path: path.map_or("<stdin>".into(), |p| p.display().to_string()), message: e.to_string() })?;
    Ok(s)
}

/// Deserializes with the JSON path of the first error.
pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T, CliError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let v = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        CliError::Input { path, message: e.into_inner().to_string() }
    })?;
    de.end().map_err(|e| CliError::Input { path: ".".into(), message: e.to_string() })?;
    Ok(v)
}

fn envelope(command: &str, body: Vec<(&str, Value)>, elapsed: Option<f64>) -> Value {
    let mut m = serde_json::Map::new();
    m.insert("schema_version".into(), SCHEMA_VERSION.into());
    m.insert("command".into(), command.into());
    for (k, v) in body {
        m.insert(k.into(), v);
    }
    if let Some(ms) = elapsed {
        m.insert("elapsed_ms".into(), ms.into());
    }
    Value::Object(m)
}

fn emit(json: bool, v: &Value) {
    if json {
        println!("{}", serde_json::to_string_pretty(v).expect("values serialize"));
    } else {
        print!("{}", render::text(v));
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = cli.command.name();
    let start = Instant::now();
    let result = commands::run(&cli);
    let elapsed = cli.timing.then(|| start.elapsed().as_secs_f64() * 1e3);
    match result {
        Ok(out) => {
            let v = envelope(name, vec![("passed", out.passed.into()), ("report", out.report)], elapsed);
            emit(cli.json, &v);
            if out.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(CliError::Input { path, message }) => {
            let path = if path.is_empty() { ".".to_string() } else { path };
            eprintln!("error: malformed input at `{path}`: {message}");
            if cli.json {
                let err = serde_json::json!({"kind": "malformed-input", "path": path, "message": message});
                emit(true, &envelope(name, vec![("error", err)], elapsed));
            }
            ExitCode::from(2)
        }
        Err(CliError::Math(e)) => {
            eprintln!("error: {e}");
            if cli.json {
                let err = serde_json::json!({"kind": "validation", "message": e.to_string()});
                emit(true, &envelope(name, vec![("passed", false.into()), ("error", err)], elapsed));
            }
            ExitCode::from(1)
        }
    }
}

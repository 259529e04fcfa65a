use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or a violated precondition (exit 2).
    Usage(String),
    Core(qcong::Error),
    Io(String),
}

impl CliError {
    pub fn diagnostic(&self) -> String {
        match self {
            CliError::Usage(msg) => format!("error: {msg}"),
            CliError::Core(e) => format!("error[{}]: {e}", e.kind()),
            CliError::Io(msg) => format!("error: {msg}"),
        }
    }
}

impl From<qcong::Error> for CliError {
    fn from(e: qcong::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub params: Value,
    pub tool_version: String,
    pub output_path: Option<String>,
    pub threads: usize,
    pub wall_time_s: f64,
}

/// A finished run: the result object plus an optional oracle disagreement.
pub struct Report {
    pub result: Value,
    pub tolerance_failure: Option<String>,
}

impl Report {
    pub fn ok(result: impl Serialize) -> CliResult<Self> {
        Ok(Self {
            result: serde_json::to_value(result)?,
            tolerance_failure: None,
        })
    }

    pub fn checked(result: impl Serialize, failure: Option<String>) -> CliResult<Self> {
        Ok(Self {
            result: serde_json::to_value(result)?,
            tolerance_failure: failure,
        })
    }
}

/// Where an artifact goes: `--out`, else the output directory, else stdout.
pub fn destination(
    out: Option<&Path>,
    out_dir: Option<&Path>,
    default_name: &str,
) -> Option<PathBuf> {
    out.map(Path::to_path_buf)
        .or_else(|| out_dir.map(|d| d.join(default_name)))
}

/// `count` with p = 7, n = 6 -> `count-p7-n6`; unset and false flags are skipped.
pub fn default_stem(subcommand: &str, params: &Value) -> String {
    let mut stem = subcommand.to_string();
    if let Some(obj) = params.as_object() {
        for (key, v) in obj {
            match v {
                Value::Null | Value::Bool(false) => {}
                _ if key == "out" => {}
                Value::Bool(true) => stem.push_str(&format!("-{key}")),
                Value::String(s) => stem.push_str(&format!("-{key}{s}")),
                other => stem.push_str(&format!("-{key}{other}")),
            }
        }
    }
    stem.replace(['/', '\\', ' ', ','], "_")
}

fn ensure_parent(path: &Path) -> CliResult<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    Ok(())
}

pub fn write_json(path: Option<&Path>, value: &Value) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value)?;
    match path {
        Some(path) => {
            ensure_parent(path)?;
            fs::write(path, text + "\n")
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
        }
        None => {
            let mut stdout = io::stdout().lock();
            writeln!(stdout, "{text}")?;
            Ok(())
        }
    }
}

pub fn document(manifest: &RunManifest, result: Value) -> Value {
    json!({ "manifest": manifest, "result": result })
}

pub fn csv_writer(path: Option<&Path>) -> CliResult<csv::Writer<Box<dyn Write>>> {
    let sink: Box<dyn Write> = match path {
        Some(path) => {
            ensure_parent(path)?;
            Box::new(
                fs::File::create(path)
                    .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
            )
        }
        None => Box::new(io::stdout()),
    };
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(sink))
}

/// `results.csv` -> `results.csv.manifest.json`
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl From<qcong::Complex64> for ComplexValue {
    fn from(z: qcong::Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

//! The subcommands, as functions returning their output text.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use submin::oracle::brute_min;
use submin::{solve_with, Instance, SolveOptions};

use crate::format::{InstanceFile, ResultFile, FORMAT_VERSION};
use crate::generate::{generate, GenerateConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    /// 1 for I/O and internal failures, 2 for input that does not parse or
    /// validate.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Internal(_) => 1,
            CliError::Parse { .. } | CliError::Invalid(_) => 2,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Text,
}

pub fn read_instance_file(path: &Path) -> CliResult<InstanceFile> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    let file: InstanceFile =
        serde_json::from_str(&text).map_err(|e| CliError::Parse { path: path.into(), message: e.to_string() })?;
    if file.version != FORMAT_VERSION {
        return Err(CliError::Parse {
            path: path.into(),
            message: format!("unsupported version {} (expected {FORMAT_VERSION})", file.version),
        });
    }
    Ok(file)
}

pub fn load_instance(path: &Path) -> CliResult<Instance> {
    let file = read_instance_file(path)?;
    file.to_instance().map_err(|e| CliError::Invalid(format!("invalid instance: {e}")))
}

/// Writes to `path`, or to stdout without one.
pub fn write_output(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io { path: p.into(), source }),
        None => io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io { path: "<stdout>".into(), source }),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

pub fn solve(input: &Path, format: Format, audit: bool, stats: bool) -> CliResult<String> {
    let instance = load_instance(input)?;
    let report = instance.validate();
    if !report.is_valid() {
        return Err(CliError::Invalid(format!("invalid instance:\n{report}")));
    }
    let start = Instant::now();
    let result = solve_with(&instance, SolveOptions { audit }).map_err(|e| CliError::Internal(e.to_string()))?;
    let elapsed = start.elapsed();
    let mut file = ResultFile::new(&result, audit);
    if stats {
        file.wall_time_ms = Some(elapsed.as_secs_f64() * 1e3);
    }
    Ok(match format {
        Format::Json => to_json(&file),
        Format::Text => file.to_text(),
    })
}

/// The report text, and whether the instance is valid.
pub fn validate(input: &Path) -> CliResult<(String, bool)> {
    let file = read_instance_file(input)?;
    let instance = match file.to_instance() {
        Ok(i) => i,
        Err(e) => return Ok((format!("invalid\n  {e}\n"), false)),
    };
    let report = instance.validate();
    let text = if report.is_valid() && report.warnings.is_empty() {
        "valid\n".to_string()
    } else if report.is_valid() {
        format!("valid\n{report}\n")
    } else {
        format!("invalid\n{report}\n")
    };
    Ok((text, report.is_valid()))
}

pub fn normalize(input: &Path) -> CliResult<String> {
    let instance = load_instance(input)?;
    let normalized = instance.normalized().map_err(|e| CliError::Invalid(format!("cannot normalize: {e}")))?;
    let report = normalized.validate();
    if !report.is_valid() {
        return Err(CliError::Invalid(format!("normalized instance is still invalid:\n{report}")));
    }
    Ok(to_json(&InstanceFile::from_instance(&normalized)))
}

pub fn generate_instance(config: &GenerateConfig) -> CliResult<String> {
    let file = generate(config).map_err(|e| CliError::Invalid(e.to_string()))?;
    Ok(to_json(&file))
}

#[derive(Serialize)]
struct OracleOutput {
    minimum: i64,
    minimizer: Vec<usize>,
    minimizer_count: usize,
    evaluations: u64,
}

pub fn oracle(input: &Path, format: Format) -> CliResult<String> {
    let instance = load_instance(input)?;
    let report = brute_min(&instance).map_err(|e| CliError::Invalid(e.to_string()))?;
    let out = OracleOutput {
        minimum: report.minimum,
        minimizer: report.smallest_minimizer(),
        minimizer_count: report.minimizers.len(),
        evaluations: report.evaluations,
    };
    Ok(match format {
        Format::Json => to_json(&out),
        Format::Text => {
            let nodes: Vec<String> = out.minimizer.iter().map(|i| i.to_string()).collect();
            format!(
                "minimum     {}\nminimizer   {{{}}} (smallest of {})\n",
                out.minimum,
                nodes.join(", "),
                out.minimizer_count
            )
        }
    })
}

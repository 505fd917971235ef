//! Batch front end: one command per pipeline, a JSON configuration in,
//! `report.json` and CSV field dumps out.
//!
//! Exit status: 0 when every claim and check passes, 1 when one fails (the
//! report is still written), 2 for unusable input.

mod commands;
mod report;

use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

pub use report::{Check, Report, CLAIMS};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    CyValidate,
    FamilyScan,
    Embed,
    Legendre,
    MaSolve,
    PartialLegendre,
    Semiflat,
    Gh,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::CyValidate => "cy-validate",
            Command::FamilyScan => "family-scan",
            Command::Embed => "embed",
            Command::Legendre => "legendre",
            Command::MaSolve => "ma-solve",
            Command::PartialLegendre => "partial-legendre",
            Command::Semiflat => "semiflat",
            Command::Gh => "gh",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub config: PathBuf,
    /// Replaces the fixed tolerances of the command; tolerances estimated
    /// from the grid are unaffected.
    pub tol: Option<f64>,
    pub out: PathBuf,
    /// Also compute the Ricci tensor through Christoffel symbols.
    pub oracle: bool,
}

/// Files written into the output directory.
pub(crate) struct Output {
    dir: PathBuf,
    files: Vec<String>,
}

impl Output {
    pub(crate) fn create(&mut self, name: &str) -> Result<BufWriter<File>> {
        self.files.push(name.to_string());
        Ok(BufWriter::new(File::create(self.dir.join(name))?))
    }
}

/// Settings shared by all commands.
pub(crate) struct Context {
    pub base: Option<PathBuf>,
    pub tol: Option<f64>,
    pub oracle: bool,
}

impl Context {
    pub(crate) fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    pub(crate) fn base(&self) -> Option<&Path> {
        self.base.as_deref()
    }
}

/// Whether an error means the input could not be used at all.
fn is_input_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Input(_) | Error::Dimension(_) | Error::Degree(_) | Error::Io(_) | Error::Json(_) | Error::Csv(_)
    )
}

/// Run a command and write its report. Input problems come back as errors;
/// numerical failures are recorded in the returned report.
pub fn run(cfg: &RunConfig) -> Result<Report> {
    if let Some(t) = cfg.tol {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Input(format!("--tol must be positive, got {t}")));
        }
    }
    let text = fs::read_to_string(&cfg.config)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", cfg.config.display())))?;
    let value: Value = serde_json::from_str(&text)?;
    let ctx = Context {
        base: cfg.config.parent().map(Path::to_path_buf),
        tol: cfg.tol,
        oracle: cfg.oracle,
    };
    fs::create_dir_all(&cfg.out)?;
    let mut out = Output {
        dir: cfg.out.clone(),
        files: Vec::new(),
    };
    let mut report = Report::new(cfg.command.name());
    match commands::dispatch(cfg.command, &ctx, &value, &mut report, &mut out) {
        Ok(()) => {}
        Err(e) if is_input_error(&e) => return Err(e),
        Err(e) => report.fail(e.to_string()),
    }
    report.files = out.files;
    report.files.sort();
    report.finish();
    let mut body = serde_json::to_string_pretty(&report)?;
    body.push('\n');
    fs::write(cfg.out.join("report.json"), body)?;
    Ok(report)
}

fn log_line(cfg: &RunConfig, code: i32, message: &str) {
    let stamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let line = format!(
        "{stamp} {} config={} exit={code} {message}\n",
        cfg.command.name(),
        cfg.config.display()
    );
    if fs::create_dir_all(&cfg.out).is_ok() {
        if let Ok(mut f) = OpenOptions::new().create(true).append(true).open(cfg.out.join("run.log")) {
            let _ = f.write_all(line.as_bytes());
        }
    }
}

/// Run a command, print a one-line diagnostic on failure, append to
/// `run.log` and return the exit status.
pub fn execute(cfg: &RunConfig) -> i32 {
    match run(cfg) {
        Ok(report) => {
            let code = if report.pass { EXIT_PASS } else { EXIT_FAIL };
            let status = if report.pass { "pass" } else { "fail" };
            if let Some(e) = &report.error {
                eprintln!("{}: {}", cfg.command.name(), e.replace('\n', " "));
            }
            log_line(cfg, code, status);
            code
        }
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("error: {msg}");
            log_line(cfg, EXIT_INPUT, &msg);
            EXIT_INPUT
        }
    }
}

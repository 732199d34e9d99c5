//! Command-line surface, `key = value` configuration, record files, run
//! manifests and SVG charts.
//!
//! Parameters resolve in the order built-in default, `--config` file, flag.
//! Every value a command reads is written back to `manifest.txt`, which is
//! itself a valid `--config` file.
//!
//! Without `--out`, records go to standard output; with it, the output
//! directory receives the record file, `manifest.txt` and any charts.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::ffi::OsString;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::bilinear_certifier::{self as cert, EstimateRatioRecord, Lemma, Resolution, SweepSpec};
use crate::dyadic::DyadicIndex;
use crate::linear_verifier::{
    cutoff_free_wave, linear_estimates_check, local_smoothing_check, random_band, smooth_band, strichartz_ratio,
    LinearError, LinearInput, LinearParams,
};
use crate::probes::{self, ProbeError, ProbeRecord, SweepRecord};
use crate::resonance::{representative_cases, resonance_bound_ratio, ResonanceError};
use crate::solver::{self, Diagnostics, SolveConfig, SolverError};
use crate::spectral_core::{make_grid, SpaceTimeGrid, SpectralError};

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad input; exit code 2.
    #[error("{0}")]
    Validation(String),
    /// Failure while running; exit code 1.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::Config(_) | SolverError::NotReal(_) | SolverError::Spectral(_) => CliError::Validation(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<cert::CertifyError> for CliError {
    fn from(e: cert::CertifyError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<ProbeError> for CliError {
    fn from(e: ProbeError) -> Self {
        match e {
            ProbeError::Solver(inner) => inner.into(),
            ProbeError::Norm(_) => CliError::Runtime(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<LinearError> for CliError {
    fn from(e: LinearError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<ResonanceError> for CliError {
    fn from(e: ResonanceError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<SpectralError> for CliError {
    fn from(e: SpectralError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Jsonl,
    Csv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Jsonl => "jsonl",
            Format::Csv => "csv",
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "dgbo", version, about = "Pseudospectral lab for the dispersion-generalized Benjamin-Ono equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrating-factor RK4 solve with conservation diagnostics.
    Solve(Params),
    /// Picard iteration with contraction factors.
    Picard(Params),
    /// Dyadic block-bound certification sweep.
    CertifyBilinear(Params),
    /// Strichartz and linear X-space estimate ratios.
    VerifyLinear(Params),
    /// Local smoothing identity on a unit frequency band.
    VerifySmoothing(Params),
    /// Resonance comparability per interaction case.
    ResonanceScan(Params),
    /// Regularity threshold for (alpha, r).
    Threshold(Params),
    /// Picard contraction sweep around the threshold.
    Sweep(Params),
    /// Second-iterate growth table.
    ProbeIllposedness(Params),
}

impl Command {
    fn split(self) -> (&'static str, Params) {
        match self {
            Command::Solve(p) => ("solve", p),
            Command::Picard(p) => ("picard", p),
            Command::CertifyBilinear(p) => ("certify-bilinear", p),
            Command::VerifyLinear(p) => ("verify-linear", p),
            Command::VerifySmoothing(p) => ("verify-smoothing", p),
            Command::ResonanceScan(p) => ("resonance-scan", p),
            Command::Threshold(p) => ("threshold", p),
            Command::Sweep(p) => ("sweep", p),
            Command::ProbeIllposedness(p) => ("probe-illposedness", p),
        }
    }
}

#[derive(Args, Debug, Default)]
struct Params {
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    r: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    s: Option<f64>,
    #[arg(long = "b-epsilon")]
    b_epsilon: Option<f64>,
    /// Time horizon (solver) or window width (linear checks).
    #[arg(long = "T")]
    t_final: Option<f64>,
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    nt: Option<usize>,
    #[arg(long = "half-width")]
    half_width: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "N-max")]
    n_max: Option<u64>,
    #[arg(long = "L-max")]
    l_max: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Lemma id (`L31`, `L32a`, `L32b1`, ...) or `all`.
    #[arg(long)]
    lemma: Option<String>,
    #[arg(long)]
    amplitude: Option<f64>,
    /// Comma-separated list.
    #[arg(long)]
    alphas: Option<String>,
    /// Comma-separated list.
    #[arg(long)]
    rs: Option<String>,
    /// Comma-separated list of offsets from the threshold.
    #[arg(long, allow_hyphen_values = true)]
    offsets: Option<String>,
    /// Evaluation time of the probe.
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
}

impl Params {
    fn entries(&self) -> Vec<(&'static str, String)> {
        let mut v: Vec<(&'static str, String)> = Vec::new();
        macro_rules! put {
            ($key:literal, $field:expr) => {
                if let Some(x) = &$field {
                    v.push(($key, x.to_string()));
                }
            };
        }
        put!("alpha", self.alpha);
        put!("r", self.r);
        put!("s", self.s);
        put!("b_epsilon", self.b_epsilon);
        put!("T", self.t_final);
        put!("nx", self.nx);
        put!("nt", self.nt);
        put!("half_width", self.half_width);
        put!("dt", self.dt);
        put!("seed", self.seed);
        put!("N_max", self.n_max);
        put!("L_max", self.l_max);
        put!("trials", self.trials);
        put!("lemma", self.lemma);
        put!("amplitude", self.amplitude);
        put!("alphas", self.alphas);
        put!("rs", self.rs);
        put!("offsets", self.offsets);
        put!("t", self.t);
        put!("samples", self.samples);
        if let Some(o) = &self.out {
            v.push(("out", o.display().to_string()));
        }
        if let Some(f) = self.format {
            v.push(("format", f.extension().to_string()));
        }
        v
    }
}

/// Keys understood in configuration files.
pub const CONFIG_KEYS: &[&str] = &[
    "alpha", "r", "s", "b_epsilon", "T", "nx", "nt", "half_width", "dt", "seed", "out", "format", "N_max", "L_max",
    "trials", "lemma", "amplitude", "alphas", "rs", "offsets", "t", "samples",
];

/// Keys written to manifests for information only.
const INFO_KEYS: &[&str] = &["command", "version"];

/// Parses `key = value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Validation(format!("config line {}: expected `key = value`", i + 1)))?;
        let key = k.trim().replace('-', "_");
        if INFO_KEYS.contains(&key.as_str()) {
            continue;
        }
        if !CONFIG_KEYS.contains(&key.as_str()) {
            return Err(CliError::Validation(format!("config line {}: unknown key `{key}`", i + 1)));
        }
        out.insert(key, v.trim().to_string());
    }
    Ok(out)
}

/// Parameters of one run after merging file and flags.
#[derive(Debug)]
pub struct RunConfig {
    pub command: String,
    params: BTreeMap<String, String>,
    resolved: RefCell<BTreeMap<String, String>>,
}

impl RunConfig {
    pub fn new(command: &str, params: BTreeMap<String, String>) -> Self {
        Self { command: command.to_string(), params, resolved: RefCell::new(BTreeMap::new()) }
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.params.get(key).map(|s| s.as_str())
    }

    fn note(&self, key: &str, v: String) {
        self.resolved.borrow_mut().insert(key.to_string(), v);
    }

    fn parsed<T: std::str::FromStr + ToString>(&self, key: &str, default: Option<T>) -> Result<T, CliError> {
        let v = match self.raw(key) {
            Some(s) => s.parse::<T>().map_err(|_| CliError::Validation(format!("--{key}: cannot parse `{s}`")))?,
            None => default.ok_or_else(|| CliError::Validation(format!("missing required parameter --{key}")))?,
        };
        self.note(key, v.to_string());
        Ok(v)
    }

    pub fn f64(&self, key: &str, default: f64) -> Result<f64, CliError> {
        self.parsed(key, Some(default))
    }

    pub fn required_f64(&self, key: &str) -> Result<f64, CliError> {
        self.parsed::<f64>(key, None)
    }

    pub fn usize(&self, key: &str, default: usize) -> Result<usize, CliError> {
        self.parsed(key, Some(default))
    }

    pub fn u64(&self, key: &str, default: u64) -> Result<u64, CliError> {
        self.parsed(key, Some(default))
    }

    pub fn string(&self, key: &str, default: &str) -> String {
        let v = self.raw(key).unwrap_or(default).to_string();
        self.note(key, v.clone());
        v
    }

    pub fn list(&self, key: &str, default: &str) -> Result<Vec<f64>, CliError> {
        let s = self.string(key, default);
        s.split(',')
            .map(str::trim)
            .filter(|x| !x.is_empty())
            .map(|x| x.parse::<f64>().map_err(|_| CliError::Validation(format!("--{key}: cannot parse `{x}`"))))
            .collect()
    }

    pub fn seed(&self) -> Result<u64, CliError> {
        self.u64("seed", 0)
    }

    pub fn format(&self) -> Result<Format, CliError> {
        match self.string("format", "jsonl").as_str() {
            "jsonl" => Ok(Format::Jsonl),
            "csv" => Ok(Format::Csv),
            other => Err(CliError::Validation(format!("--format must be jsonl or csv, got `{other}`"))),
        }
    }

    pub fn out(&self) -> Option<PathBuf> {
        self.raw("out").map(|o| {
            self.note("out", o.to_string());
            PathBuf::from(o)
        })
    }

    /// `key = value` text of every resolved parameter.
    pub fn manifest(&self) -> String {
        let mut s = String::from("# dgbo run manifest\n");
        let _ = writeln!(s, "command = {}", self.command);
        let _ = writeln!(s, "version = {}", env!("CARGO_PKG_VERSION"));
        for (k, v) in self.resolved.borrow().iter() {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }
}

/// Record types with a fixed field order for persistence.
pub trait Record: Serialize + DeserializeOwned {
    const FIELDS: &'static [&'static str];
}

macro_rules! record {
    ($t:ty, [$($f:literal),* $(,)?]) => {
        impl Record for $t {
            const FIELDS: &'static [&'static str] = &[$($f),*];
        }
    };
}

record!(EstimateRatioRecord, [
    "lemma", "case", "n1", "n2", "n", "l1", "l2", "l", "r", "alpha", "trial", "seed", "j", "bound", "norms", "ratio"
]);
record!(SweepRecord, [
    "alpha", "r", "s", "t_final", "amplitude", "seed", "contraction_factors", "converged", "diverged", "final_residual",
    "error"
]);
record!(ProbeRecord, [
    "n", "alpha", "s", "r", "t", "hs_norm", "hr_norm", "hs_ratio", "hr_ratio", "hs_trend", "hr_trend", "hs_monotone",
    "hr_monotone"
]);
record!(Diagnostics, ["t", "mean", "l2", "energy"]);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRecord {
    pub alpha: f64,
    pub r: f64,
    pub threshold: f64,
}
record!(ThresholdRecord, ["alpha", "r", "threshold"]);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PicardStepRecord {
    pub iteration: usize,
    pub difference: f64,
    pub kappa: Option<f64>,
}
record!(PicardStepRecord, ["iteration", "difference", "kappa"]);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifySummaryRecord {
    pub lemma: String,
    pub r: f64,
    pub alpha: f64,
    pub records: usize,
    pub slope_n: Option<f64>,
    pub slope_l: Option<f64>,
    pub max_ratio: f64,
}
record!(CertifySummaryRecord, ["lemma", "r", "alpha", "records", "slope_n", "slope_l", "max_ratio"]);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearRecord {
    pub check: String,
    pub detail: String,
    pub alpha: f64,
    pub r: f64,
    pub seed: u64,
    pub value: f64,
}
record!(LinearRecord, ["check", "detail", "alpha", "r", "seed", "value"]);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothingRecord {
    pub alpha: f64,
    pub r: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub rel_error: f64,
    pub rel_error_doubled: f64,
    pub spread: f64,
}
record!(SmoothingRecord, ["alpha", "r", "lhs", "rhs", "rel_error", "rel_error_doubled", "spread"]);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceRecord {
    pub case: String,
    pub alpha: f64,
    pub n1: u64,
    pub n2: u64,
    pub n: u64,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub samples: usize,
}
record!(ResonanceRecord, ["case", "alpha", "n1", "n2", "n", "min", "max", "mean", "samples"]);

/// `v` with 17 significant digits.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// `v` with `digits` significant digits in positional notation.
pub fn fmt_significant(v: f64, digits: usize) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let mag = v.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - mag).max(0) as usize;
    format!("{v:.decimals$}")
}

fn json_text(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => match (n.as_u64(), n.as_i64(), n.as_f64()) {
            (Some(u), _, _) if !n.is_f64() => out.push_str(&u.to_string()),
            (_, Some(i), _) if !n.is_f64() => out.push_str(&i.to_string()),
            (_, _, Some(f)) if f.is_finite() => out.push_str(&fmt_float(f)),
            _ => out.push_str("null"),
        },
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string")),
        Value::Array(a) => {
            out.push('[');
            for (i, x) in a.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                json_text(x, out);
            }
            out.push(']');
        }
        Value::Object(m) => {
            out.push('{');
            for (i, (k, x)) in m.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(k).expect("key"));
                out.push(':');
                json_text(x, out);
            }
            out.push('}');
        }
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => {
            let mut s = String::new();
            json_text(other, &mut s);
            s
        }
    }
}

fn to_object<T: Record>(rec: &T) -> Result<Map<String, Value>, CliError> {
    match serde_json::to_value(rec).map_err(|e| CliError::Runtime(e.to_string()))? {
        Value::Object(m) => Ok(m),
        _ => Err(CliError::Runtime("record does not serialize to an object".into())),
    }
}

/// Serializes records: JSON lines, or CSV with a header row. Keys follow
/// [`Record::FIELDS`]; floats carry 17 significant digits.
pub fn render_records<T: Record>(records: &[T], format: Format) -> Result<String, CliError> {
    let mut out = String::new();
    match format {
        Format::Jsonl => {
            for rec in records {
                let m = to_object(rec)?;
                let ordered: Map<String, Value> =
                    T::FIELDS.iter().map(|f| (f.to_string(), m.get(*f).cloned().unwrap_or(Value::Null))).collect();
                json_text(&Value::Object(ordered), &mut out);
                out.push('\n');
            }
        }
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(vec![]);
            w.write_record(T::FIELDS).map_err(|e| CliError::Runtime(e.to_string()))?;
            for rec in records {
                let m = to_object(rec)?;
                let row: Vec<String> = T::FIELDS.iter().map(|f| m.get(*f).map(csv_cell).unwrap_or_default()).collect();
                w.write_record(&row).map_err(|e| CliError::Runtime(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Runtime(e.to_string()))?;
            out = String::from_utf8(bytes).map_err(|e| CliError::Runtime(e.to_string()))?;
        }
    }
    Ok(out)
}

/// Writes [`render_records`] output to `path`; returns the byte count.
pub fn emit_records<T: Record>(records: &[T], format: Format, path: &Path) -> Result<usize, CliError> {
    let text = render_records(records, format)?;
    fs::write(path, &text).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
    Ok(text.len())
}

fn parse_cell(cell: &str) -> Value {
    if cell.is_empty() {
        return Value::Null;
    }
    if cell.starts_with('[') || cell.starts_with('{') || cell == "true" || cell == "false" {
        if let Ok(v) = serde_json::from_str(cell) {
            return v;
        }
    }
    if let Ok(n) = serde_json::from_str::<serde_json::Number>(cell) {
        return Value::Number(n);
    }
    Value::String(cell.to_string())
}

/// Inverse of [`render_records`].
pub fn parse_records<T: Record>(text: &str, format: Format) -> Result<Vec<T>, CliError> {
    let bad = |e: String| CliError::Validation(format!("cannot parse records: {e}"));
    match format {
        Format::Jsonl => text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| serde_json::from_str(l).map_err(|e| bad(e.to_string())))
            .collect(),
        Format::Csv => {
            let mut rd = csv::Reader::from_reader(text.as_bytes());
            let headers = rd.headers().map_err(|e| bad(e.to_string()))?.clone();
            rd.records()
                .map(|row| {
                    let row = row.map_err(|e| bad(e.to_string()))?;
                    let obj: Map<String, Value> =
                        headers.iter().zip(row.iter()).map(|(h, c)| (h.to_string(), parse_cell(c))).collect();
                    serde_json::from_value(Value::Object(obj)).map_err(|e| bad(e.to_string()))
                })
                .collect()
        }
    }
}

/// A named polyline for [`svg_chart`].
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Standalone SVG line chart with markers; logarithmic axes drop
/// nonpositive points.
pub fn svg_chart(title: &str, x_label: &str, y_label: &str, series: &[Series], log_x: bool, log_y: bool) -> String {
    let (w, h, ml, mr, mt, mb) = (640.0, 420.0, 70.0, 150.0, 40.0, 50.0);
    let tx = |v: f64| if log_x { v.log10() } else { v };
    let ty = |v: f64| if log_y { v.log10() } else { v };
    let keep = |&(x, y): &(f64, f64)| x.is_finite() && y.is_finite() && (!log_x || x > 0.0) && (!log_y || y > 0.0);
    let pts: Vec<Vec<(f64, f64)>> =
        series.iter().map(|s| s.points.iter().filter(|p| keep(p)).map(|&(x, y)| (tx(x), ty(y))).collect()).collect();
    let all: Vec<&(f64, f64)> = pts.iter().flatten().collect();
    let (mut x0, mut x1, mut y0, mut y1) = all.iter().fold(
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
        |(a, b, c, d), p| (a.min(p.0), b.max(p.0), c.min(p.1), d.max(p.1)),
    );
    if all.is_empty() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 < 1e-12 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 - y0 < 1e-12 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let px = |x: f64| ml + (x - x0) / (x1 - x0) * (w - ml - mr);
    let py = |y: f64| h - mb - (y - y0) / (y1 - y0) * (h - mt - mb);
    let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];
    let esc = |s: &str| s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;");
    let tick = |v: f64, log: bool| if log { format!("1e{v:.1}") } else { format!("{v:.3}") };
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, w / 2.0, esc(title));
    let _ = writeln!(
        s,
        r#"<rect x="{ml}" y="{mt}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        w - ml - mr,
        h - mt - mb
    );
    for i in 0..=4 {
        let fx = x0 + (x1 - x0) * i as f64 / 4.0;
        let fy = y0 + (y1 - y0) * i as f64 / 4.0;
        let _ = writeln!(s, r#"<text x="{:.1}" y="{}" text-anchor="middle">{}</text>"#, px(fx), h - mb + 16.0, tick(fx, log_x));
        let _ = writeln!(s, r#"<text x="{}" y="{:.1}" text-anchor="end">{}</text>"#, ml - 4.0, py(fy) + 4.0, tick(fy, log_y));
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, (ml + w - mr) / 2.0, h - 10.0, esc(x_label));
    let _ = writeln!(
        s,
        r#"<text x="16" y="{0}" text-anchor="middle" transform="rotate(-90 16 {0})">{1}</text>"#,
        (mt + h - mb) / 2.0,
        esc(y_label)
    );
    for (i, (ser, p)) in series.iter().zip(&pts).enumerate() {
        let c = colors[i % colors.len()];
        if p.len() > 1 {
            let path: Vec<String> = p.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
            let _ = writeln!(s, r#"<polyline fill="none" stroke="{c}" points="{}"/>"#, path.join(" "));
        }
        for &(x, y) in p {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{c}"/>"#, px(x), py(y));
        }
        let ly = mt + 14.0 + 16.0 * i as f64;
        let _ = writeln!(s, r#"<rect x="{}" y="{}" width="10" height="10" fill="{c}"/>"#, w - mr + 10.0, ly - 9.0);
        let _ = writeln!(s, r#"<text x="{}" y="{ly}">{}</text>"#, w - mr + 24.0, esc(&ser.label));
    }
    s.push_str("</svg>\n");
    s
}

/// Where a command's outputs go.
struct Sink<'a> {
    cfg: &'a RunConfig,
    out: Option<PathBuf>,
    format: Format,
}

impl<'a> Sink<'a> {
    fn new(cfg: &'a RunConfig) -> Result<Self, CliError> {
        let out = cfg.out();
        let format = cfg.format()?;
        if let Some(dir) = &out {
            fs::create_dir_all(dir).map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))?;
        }
        Ok(Self { cfg, out, format })
    }

    fn records<T: Record>(&self, name: &str, records: &[T]) -> Result<(), CliError> {
        match &self.out {
            Some(dir) => {
                emit_records(records, self.format, &dir.join(format!("{name}.{}", self.format.extension())))?;
            }
            None => {
                print!("{}", render_records(records, self.format)?);
            }
        }
        Ok(())
    }

    fn chart(&self, name: &str, svg: String) -> Result<(), CliError> {
        if let Some(dir) = &self.out {
            fs::write(dir.join(format!("{name}.svg")), svg)?;
        }
        Ok(())
    }

    /// Summary lines go to stderr when records occupy stdout.
    fn say(&self, line: &str) {
        if self.out.is_some() {
            println!("{line}");
        } else {
            eprintln!("{line}");
        }
    }

    fn finish(&self) -> Result<(), CliError> {
        if let Some(dir) = &self.out {
            let mut f = fs::File::create(dir.join("manifest.txt"))?;
            f.write_all(self.cfg.manifest().as_bytes())?;
        }
        Ok(())
    }
}

fn solve_config(cfg: &RunConfig, t_default: f64) -> Result<SolveConfig, CliError> {
    let d = SolveConfig::default();
    Ok(SolveConfig {
        alpha: cfg.f64("alpha", d.alpha)?,
        half_width: cfg.f64("half_width", d.half_width)?,
        n_x: cfg.usize("nx", d.n_x)?,
        t_final: cfg.f64("T", t_default)?,
        dt: cfg.f64("dt", d.dt)?,
        s: cfg.f64("s", d.s)?,
        r: cfg.f64("r", d.r)?,
        epsilon: cfg.f64("b_epsilon", d.epsilon)?,
        picard_nt: cfg.usize("nt", d.picard_nt)?,
        ..d
    })
}

fn cmd_solve(cfg: &RunConfig) -> Result<(), CliError> {
    let sc = solve_config(cfg, 1.0)?;
    let (amp, seed) = (cfg.f64("amplitude", 0.01)?, cfg.seed()?);
    let sink = Sink::new(cfg)?;
    sc.validate()?;
    let u0 = probes::seeded_data(sc.grid()?, amp, seed);
    let res = solver::solve(&u0, &sc)?;
    let (m, l2, e) = res.drifts();
    sink.records("diagnostics", &res.diagnostics)?;
    let e0 = res.diagnostics[0].energy;
    let l0 = res.diagnostics[0].l2;
    let rel = |a: f64, b: f64| if b == 0.0 { a.abs() } else { (a - b).abs() / b.abs() };
    sink.chart(
        "drift",
        svg_chart(
            "conservation drift",
            "t",
            "relative drift",
            &[
                Series { label: "L2".into(), points: res.diagnostics.iter().map(|d| (d.t, rel(d.l2, l0))).collect() },
                Series { label: "energy".into(), points: res.diagnostics.iter().map(|d| (d.t, rel(d.energy, e0))).collect() },
            ],
            false,
            false,
        ),
    )?;
    sink.say(&format!("mean drift {m:.3e}  L2 drift {l2:.3e}  energy drift {e:.3e}"));
    sink.finish()
}

fn cmd_picard(cfg: &RunConfig) -> Result<(), CliError> {
    let sc = solve_config(cfg, 0.1)?;
    let (amp, seed) = (cfg.f64("amplitude", 0.01)?, cfg.seed()?);
    let sink = Sink::new(cfg)?;
    sc.validate()?;
    let u0 = probes::seeded_data(sc.grid()?, amp, seed);
    let res = solver::picard_iterate(&u0, &sc)?;
    let recs: Vec<PicardStepRecord> = res
        .differences
        .iter()
        .enumerate()
        .map(|(i, &d)| PicardStepRecord { iteration: i + 1, difference: d, kappa: i.checked_sub(1).map(|j| res.contraction_factors[j]) })
        .collect();
    sink.records("picard", &recs)?;
    sink.chart(
        "kappa",
        svg_chart(
            "contraction factor",
            "iteration",
            "kappa",
            &[Series { label: "kappa".into(), points: recs.iter().filter_map(|r| r.kappa.map(|k| (r.iteration as f64, k))).collect() }],
            false,
            true,
        ),
    )?;
    sink.say(&format!(
        "converged {}  diverged {}  iterations {}  max kappa {:.3e}",
        res.converged,
        res.diverged,
        res.differences.len(),
        res.max_kappa()
    ));
    if res.diverged {
        sink.finish()?;
        return Err(CliError::Runtime("Picard iteration diverged".into()));
    }
    sink.finish()
}

fn exponent(v: u64, key: &str) -> Result<u32, CliError> {
    if v == 0 || !v.is_power_of_two() {
        return Err(CliError::Validation(format!("--{key} must be a power of two, got {v}")));
    }
    Ok(v.trailing_zeros())
}

fn cmd_certify(cfg: &RunConfig) -> Result<(), CliError> {
    let lemma = cfg.string("lemma", "all");
    let lemmas: Vec<Lemma> = if lemma == "all" { Lemma::all().to_vec() } else { vec![lemma.parse()?] };
    let (r, alpha) = (cfg.f64("r", 2.0)?, cfg.f64("alpha", 1.0)?);
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(CliError::Validation(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    let kn = exponent(cfg.u64("N_max", 32)?, "N-max")?;
    let kl = exponent(cfg.u64("L_max", 1024)?, "L-max")?;
    if kn < 1 {
        return Err(CliError::Validation("--N-max must be at least 2".into()));
    }
    let spec = SweepSpec {
        n_exps: (1..=kn).collect(),
        l_exps: (0..=kl).collect(),
        trials: cfg.usize("trials", 32)?,
        resolution: Resolution::default(),
        options: cert::JOptions::default(),
        epsilon: cfg.f64("b_epsilon", 0.05)?,
    };
    let seed = cfg.seed()?;
    let sink = Sink::new(cfg)?;
    let mut records = Vec::new();
    let mut summary = Vec::new();
    let mut curves = Vec::new();
    for l in lemmas {
        let o = cert::certify_case(l, &spec, r, alpha, seed)?;
        let mut worst: BTreeMap<u64, f64> = BTreeMap::new();
        for rec in &o.records {
            let e = worst.entry(rec.n1.max(rec.n2).max(rec.n)).or_insert(0.0);
            *e = e.max(rec.ratio);
        }
        curves.push(Series { label: l.id(), points: worst.iter().map(|(&n, &v)| (n as f64, v)).collect() });
        summary.push(CertifySummaryRecord {
            lemma: l.id(),
            r,
            alpha,
            records: o.records.len(),
            slope_n: o.slope_n,
            slope_l: o.slope_l,
            max_ratio: o.max_ratio,
        });
        records.extend(o.records);
    }
    sink.records("certify", &records)?;
    if sink.out.is_some() {
        sink.records("certify_summary", &summary)?;
    }
    sink.chart("ratio_vs_nmax", svg_chart("worst ratio vs N_max", "N_max", "max ratio", &curves, true, true))?;
    for s in &summary {
        let f = |v: Option<f64>| v.map(|x| format!("{x:+.4}")).unwrap_or_else(|| "n/a".into());
        sink.say(&format!("{:<10} slope_N {}  slope_L {}  max {:.4e}", s.lemma, f(s.slope_n), f(s.slope_l), s.max_ratio));
    }
    sink.finish()
}

fn cmd_verify_linear(cfg: &RunConfig) -> Result<(), CliError> {
    let (alpha, r, s) = (cfg.f64("alpha", 1.0)?, cfg.f64("r", 2.0)?, cfg.f64("s", 0.0)?);
    let eps = cfg.f64("b_epsilon", 0.05)?;
    let space = make_grid(cfg.f64("half_width", 32.0 * PI)?, cfg.usize("nx", 512)?)?;
    let tgrid = SpaceTimeGrid::new(space, cfg.f64("T", 8.0)?, cfg.usize("nt", 256)?)?;
    let t_cut = cfg.f64("t", 1.0)?;
    let seed = cfg.seed()?;
    let sink = Sink::new(cfg)?;
    let phi = random_band(space, 1.0, 4.0, seed);
    let mut recs = Vec::new();
    let inv = |v: f64| 1.0 / v;
    let mut pairs = vec![(f64::INFINITY, 2.0), (3.0 * r, 3.0 * r)];
    if r < 2.0 {
        pairs.push((4.0, inv(inv(r) - 0.5)));
    }
    for (q, p) in pairs {
        if crate::linear_verifier::strichartz_admissible(q, p, r).is_err() {
            continue;
        }
        let v = strichartz_ratio(&phi, q, p, r, alpha, &tgrid)?;
        recs.push(LinearRecord { check: "strichartz".into(), detail: format!("q={q} p={p}"), alpha, r, seed, value: v });
    }
    let lp = LinearParams { s, b: 1.0 / r + eps, b_prime: -(r - 1.0) / r + 2.0 * eps, r, alpha };
    let hom = linear_estimates_check(LinearInput::Homogeneous { phi: &phi, tgrid: &tgrid }, &lp)?;
    recs.push(LinearRecord { check: "homogeneous".into(), detail: format!("s={s} b={}", lp.b), alpha, r, seed, value: hom });
    let forcing = cutoff_free_wave(&phi, &tgrid, alpha);
    let duh = linear_estimates_check(LinearInput::Duhamel { forcing: &forcing, t_cut }, &lp)?;
    recs.push(LinearRecord { check: "duhamel".into(), detail: format!("T={t_cut} b'={}", lp.b_prime), alpha, r, seed, value: duh });
    sink.records("linear", &recs)?;
    for rec in &recs {
        sink.say(&format!("{:<12} {:<24} {:.10e}", rec.check, rec.detail, rec.value));
    }
    sink.finish()
}

fn cmd_verify_smoothing(cfg: &RunConfig) -> Result<(), CliError> {
    let alphas = cfg.list("alphas", "0.25,0.5,1")?;
    let rs = cfg.list("rs", "1.25,1.5,2")?;
    let space = make_grid(cfg.f64("half_width", 64.0 * PI)?, cfg.usize("nx", 1024)?)?;
    let (tw, nt) = (cfg.f64("T", 8.0)?, cfg.usize("nt", 512)?);
    let sink = Sink::new(cfg)?;
    let base = SpaceTimeGrid::new(space, tw, nt)?;
    let wide = SpaceTimeGrid::new(space, 2.0 * tw, 2 * nt)?;
    let phi = smooth_band(space, 1.0, 2.0);
    let mut recs = Vec::new();
    for &alpha in &alphas {
        for &r in &rs {
            let a = local_smoothing_check(&phi, r, alpha, &base)?;
            let b = local_smoothing_check(&phi, r, alpha, &wide)?;
            recs.push(SmoothingRecord {
                alpha,
                r,
                lhs: a.lhs,
                rhs: a.rhs,
                rel_error: a.rel_error,
                rel_error_doubled: b.rel_error,
                spread: a.spread,
            });
        }
    }
    sink.records("smoothing", &recs)?;
    let worst = recs.iter().map(|r| r.rel_error).fold(0.0, f64::max);
    sink.say(&format!("max relative error {worst:.3e}"));
    sink.finish()
}

fn cmd_resonance(cfg: &RunConfig) -> Result<(), CliError> {
    let alphas = cfg.list("alphas", "0.25,0.5,1")?;
    let n = cfg.u64("N_max", 64)?;
    let samples = cfg.usize("samples", 10_000)?;
    let seed = cfg.seed()?;
    let sink = Sink::new(cfg)?;
    let n = DyadicIndex::new(n).map_err(|e| CliError::Validation(e.to_string()))?;
    let mut recs = Vec::new();
    for &alpha in &alphas {
        for case in representative_cases(n)? {
            let st = resonance_bound_ratio(&case, alpha, samples, seed)?;
            recs.push(ResonanceRecord {
                case: case.kind.name().into(),
                alpha,
                n1: case.n1.value(),
                n2: case.n2.value(),
                n: case.n.value(),
                min: st.min,
                max: st.max,
                mean: st.mean,
                samples: st.samples,
            });
        }
    }
    sink.records("resonance", &recs)?;
    for r in &recs {
        sink.say(&format!("{:<20} alpha {:<5} min {:.4e} max/min {:.3}", r.case, r.alpha, r.min, r.max / r.min));
    }
    sink.finish()
}

fn cmd_threshold(cfg: &RunConfig) -> Result<(), CliError> {
    let (alpha, r) = (cfg.required_f64("alpha")?, cfg.required_f64("r")?);
    let v = probes::threshold(alpha, r)?;
    println!("{}", fmt_significant(v, 10));
    let sink = Sink::new(cfg)?;
    if sink.out.is_some() {
        sink.records("threshold", &[ThresholdRecord { alpha, r, threshold: v }])?;
    }
    sink.finish()
}

fn cmd_sweep(cfg: &RunConfig) -> Result<(), CliError> {
    let alphas = cfg.list("alphas", "0.5,0.75,1")?;
    let rs = cfg.list("rs", "1.4")?;
    let offsets = cfg.list("offsets", "0.5")?;
    let base = solve_config(cfg, 0.1)?;
    let (amp, seed) = (cfg.f64("amplitude", 0.01)?, cfg.seed()?);
    let sink = Sink::new(cfg)?;
    let recs = probes::threshold_sweep(&alphas, &rs, &offsets, &base, amp, seed)?;
    sink.records("sweep", &recs)?;
    let series: Vec<Series> = recs
        .iter()
        .map(|r| Series {
            label: format!("a={} r={} s={:.3}", r.alpha, r.r, r.s),
            points: r.contraction_factors.iter().enumerate().map(|(i, &k)| ((i + 2) as f64, k)).collect(),
        })
        .collect();
    sink.chart("kappa", svg_chart("contraction factors", "iteration", "kappa", &series, false, true))?;
    for r in &recs {
        let kmax = r.contraction_factors.iter().cloned().fold(0.0, f64::max);
        match &r.error {
            Some(e) => sink.say(&format!("alpha {} r {} s {:.4}: error {e}", r.alpha, r.r, r.s)),
            None => sink.say(&format!("alpha {} r {} s {:.4}: converged {} max kappa {kmax:.3e}", r.alpha, r.r, r.s, r.converged)),
        }
    }
    sink.finish()
}

fn cmd_probe(cfg: &RunConfig) -> Result<(), CliError> {
    let alpha = cfg.f64("alpha", 0.25)?;
    let s = cfg.f64("s", 0.0)?;
    let rs = cfg.list("rs", "1.2,2")?;
    let k = exponent(cfg.u64("N_max", 512)?, "N-max")?;
    let t = cfg.f64("t", 1.0)?;
    let seed = cfg.seed()?;
    let sink = Sink::new(cfg)?;
    if k < 2 {
        return Err(CliError::Validation("--N-max must be at least 4".into()));
    }
    let ns: Vec<u64> = (k.min(4).max(2)..=k).map(|e| 1u64 << e).collect();
    let recs = probes::illposedness_probe(&ns, alpha, s, &rs, t, seed)?;
    sink.records("probe", &recs)?;
    let mut series = Vec::new();
    for &r in &rs {
        let rows: Vec<&ProbeRecord> = recs.iter().filter(|x| x.r == r).collect();
        series.push(Series { label: format!("H^s_{r}"), points: rows.iter().map(|x| (x.n as f64, x.hr_ratio)).collect() });
        if r == rs[0] {
            series.push(Series { label: "H^s".into(), points: rows.iter().map(|x| (x.n as f64, x.hs_ratio)).collect() });
        }
    }
    sink.chart("probe", svg_chart("second iterate / data^2", "N", "ratio", &series, true, true))?;
    sink.say(&format!("{} rows", recs.len()));
    sink.finish()
}

/// Applies `DGBO_THREADS` (0 or unset: automatic) to the global worker pool.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("DGBO_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().map_err(|_| CliError::Validation(format!("DGBO_THREADS must be an integer, got `{v}`")))?;
    if n > 0 {
        // A pool configured earlier in the process stays in place.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Runs a parsed command with its merged parameters.
pub fn dispatch(cfg: &RunConfig) -> Result<(), CliError> {
    match cfg.command.as_str() {
        "solve" => cmd_solve(cfg),
        "picard" => cmd_picard(cfg),
        "certify-bilinear" => cmd_certify(cfg),
        "verify-linear" => cmd_verify_linear(cfg),
        "verify-smoothing" => cmd_verify_smoothing(cfg),
        "resonance-scan" => cmd_resonance(cfg),
        "threshold" => cmd_threshold(cfg),
        "sweep" => cmd_sweep(cfg),
        "probe-illposedness" => cmd_probe(cfg),
        other => Err(CliError::Validation(format!("unknown subcommand `{other}`"))),
    }
}

fn build_config(name: &str, params: &Params) -> Result<RunConfig, CliError> {
    let mut map = match &params.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
            parse_config(&text)?
        }
        None => BTreeMap::new(),
    };
    for (k, v) in params.entries() {
        map.insert(k.to_string(), v);
    }
    Ok(RunConfig::new(name, map))
}

/// Entry point: parses `argv` (program name first) and returns the exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let (name, params) = cli.command.split();
    let result = configure_threads().and_then(|_| build_config(name, &params)).and_then(|cfg| dispatch(&cfg));
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn est(ratio: f64) -> EstimateRatioRecord {
        EstimateRatioRecord {
            lemma: "L31".into(),
            case: "any".into(),
            n1: 4,
            n2: 2,
            n: 4,
            l1: 8,
            l2: 2,
            l: 4,
            r: 2.0,
            alpha: 1.0,
            trial: 0,
            seed: 12345678901234567890,
            j: 1.0 / 3.0,
            bound: 2.0,
            norms: 0.1 + 0.2,
            ratio,
        }
    }

    #[test]
    fn config_parsing() {
        let m = parse_config("# c\nalpha = 0.5  # tail\n\nN-max=64\ncommand = solve\n").unwrap();
        assert_eq!(m.get("alpha").unwrap(), "0.5");
        assert_eq!(m.get("N_max").unwrap(), "64");
        assert!(!m.contains_key("command"));
        assert!(parse_config("bogus = 1").is_err());
        assert!(parse_config("alpha 1").is_err());
    }

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_significant(-1.0 / 3.0, 10), "-0.3333333333");
        assert_eq!(fmt_significant(0.3, 10), "0.3000000000");
        assert_eq!(fmt_significant(12.5, 4), "12.50");
        assert_eq!(fmt_float(0.1), "1.0000000000000001e-1");
    }

    #[test]
    fn jsonl_one_line_and_field_order() {
        let text = render_records(&[est(0.25)], Format::Jsonl).unwrap();
        assert_eq!(text.matches('\n').count(), 1);
        assert!(text.ends_with('\n'));
        let keys: Vec<usize> = EstimateRatioRecord::FIELDS.iter().map(|f| text.find(&format!("\"{f}\":")).unwrap()).collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
        assert!(text.contains("\"j\":3.3333333333333331e-1"));
    }

    #[test]
    fn csv_empty_is_header_only() {
        let text = render_records::<EstimateRatioRecord>(&[], Format::Csv).unwrap();
        assert_eq!(text, format!("{}\n", EstimateRatioRecord::FIELDS.join(",")));
    }

    #[test]
    fn round_trips() {
        let recs = vec![est(0.25), est(1e-300), est(7.0)];
        for f in [Format::Jsonl, Format::Csv] {
            assert_eq!(parse_records::<EstimateRatioRecord>(&render_records(&recs, f).unwrap(), f).unwrap(), recs);
        }
        let sw = vec![SweepRecord {
            alpha: 1.0,
            r: 1.5,
            s: 0.1 + 0.2,
            t_final: 0.1,
            amplitude: 0.01,
            seed: 3,
            contraction_factors: vec![1e-3, 2.5e-4],
            converged: true,
            diverged: false,
            final_residual: None,
            error: Some("a, \"quoted\" note".into()),
        }];
        for f in [Format::Jsonl, Format::Csv] {
            assert_eq!(parse_records::<SweepRecord>(&render_records(&sw, f).unwrap(), f).unwrap(), sw);
        }
    }

    #[test]
    fn field_lists_match_serialization() {
        fn keys<T: Record>(r: &T) -> Vec<String> {
            to_object(r).unwrap().keys().cloned().collect()
        }
        assert_eq!(keys(&est(1.0)), EstimateRatioRecord::FIELDS);
        let d = Diagnostics { t: 0.0, mean: 0.0, l2: 0.0, energy: 0.0 };
        assert_eq!(keys(&d), Diagnostics::FIELDS);
        let p = ProbeRecord {
            n: 4,
            alpha: 0.5,
            s: 0.0,
            r: 2.0,
            t: 1.0,
            hs_norm: 1.0,
            hr_norm: 1.0,
            hs_ratio: 1.0,
            hr_ratio: 1.0,
            hs_trend: None,
            hr_trend: None,
            hs_monotone: true,
            hr_monotone: true,
        };
        assert_eq!(keys(&p), ProbeRecord::FIELDS);
    }

    #[test]
    fn svg_is_well_formed() {
        let s = svg_chart("t", "x", "y", &[Series { label: "a<b".into(), points: vec![(1.0, 1.0), (2.0, 4.0), (4.0, 0.0)] }], true, true);
        assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
        assert!(s.contains("a&lt;b"));
        assert_eq!(s.matches("<circle").count(), 2);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_cli(["dgbo", "threshold", "--alpha", "1", "--r", "1.5"]), 0);
        assert_eq!(run_cli(["dgbo", "threshold", "--alpha", "1", "--r", "2.5"]), 2);
        assert_eq!(run_cli(["dgbo", "threshold", "--alpha", "1"]), 2);
        assert_eq!(run_cli(["dgbo", "solve", "--alpha", "1.5"]), 2);
        assert_eq!(run_cli(["dgbo", "frobnicate"]), 2);
        assert_eq!(run_cli(["dgbo", "certify-bilinear", "--lemma", "L99"]), 2);
    }
}

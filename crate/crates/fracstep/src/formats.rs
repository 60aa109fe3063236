//! Artifact formats: the piecewise-constant table, CSV tables and the JSON
//! summary.

use std::fmt::Write as _;

use fracstep_core::splitting::{ConvRow, TraceRow};
use fracstep_core::{PcFn, State};
use serde::Serialize;

use crate::error::CliError;

/// Version of every artifact schema written by this crate.
pub const SCHEMA_VERSION: u32 = 1;

/// Header of convergence tables.
pub const CONVERGENCE_HEADER: &str = "s,t,distance,slope,bound,pass";
/// Header of check tables.
pub const CHECK_HEADER: &str = "check,parameter,value,bound,pass";
/// Header of trace tables.
pub const TRACE_HEADER: &str =
    "t,v,q,upsilon,upsilon_before_source,v_before_source,tv,l1,fronts,bound";

/// A float with 17 significant digits, `NaN`/`inf`/`-inf` otherwise.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Plain-text table: one row `x | v₁ v₂ …` per breakpoint giving the value to
/// the right of `x`. Tails are zero. Floats use the shortest round-trip form.
pub fn pcfn_to_table(u: &PcFn) -> String {
    let mut out = format!("# pcfn dim={}\n", u.dim());
    for (x, v) in u.breaks().iter().zip(&u.values()[1..]) {
        let comps: Vec<String> = v.as_slice().iter().map(|c| format!("{c:?}")).collect();
        let _ = writeln!(out, "{x:?} | {}", comps.join(" "));
    }
    out
}

pub fn pcfn_from_table(text: &str) -> Result<PcFn, CliError> {
    let bad = |line: usize, msg: &str| CliError::Format(format!("pcfn table line {line}: {msg}"));
    let mut lines = text.lines().enumerate();
    let (_, head) = lines.next().ok_or_else(|| bad(1, "empty"))?;
    let dim: usize = head
        .strip_prefix("# pcfn dim=")
        .and_then(|d| d.trim().parse().ok())
        .ok_or_else(|| bad(1, "expected '# pcfn dim=<n>'"))?;
    let mut breaks = Vec::new();
    let mut values = vec![State::zeros(dim)];
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let (x, rest) = line
            .split_once('|')
            .ok_or_else(|| bad(i + 1, "missing '|'"))?;
        breaks.push(
            x.trim()
                .parse::<f64>()
                .map_err(|e| bad(i + 1, &e.to_string()))?,
        );
        let comps: Vec<f64> = rest
            .split_whitespace()
            .map(str::parse::<f64>)
            .collect::<Result<_, _>>()
            .map_err(|e| bad(i + 1, &e.to_string()))?;
        if comps.len() != dim {
            return Err(bad(i + 1, "wrong number of components"));
        }
        values.push(State::from_slice(&comps));
    }
    if breaks.is_empty() {
        return Ok(PcFn::zero(dim));
    }
    if !values[values.len() - 1].is_zero() {
        return Err(bad(text.lines().count(), "the last value must be zero"));
    }
    PcFn::new(dim, breaks, values).map_err(Into::into)
}

fn bool_cell(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

pub fn convergence_csv(rows: &[ConvRow]) -> String {
    let mut out = format!("{CONVERGENCE_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            num(r.s),
            num(r.t),
            num(r.distance),
            num(r.slope),
            num(r.bound),
            bool_cell(r.pass)
        );
    }
    out
}

/// One row of a check table.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub check: String,
    pub parameter: f64,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

pub fn check_csv(rows: &[CheckRow]) -> String {
    let mut out = format!("{CHECK_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.check,
            num(r.parameter),
            num(r.value),
            num(r.bound),
            bool_cell(r.pass)
        );
    }
    out
}

pub fn trace_csv(rows: &[TraceRow]) -> String {
    let mut out = format!("{TRACE_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            num(r.t),
            num(r.v),
            num(r.q),
            num(r.upsilon),
            num(r.upsilon_before_source),
            num(r.v_before_source),
            num(r.tv),
            num(r.l1),
            r.fronts,
            num(r.bound)
        );
    }
    out
}

/// A scored acceptance check in the summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// The bound exactly as scored, e.g. `slope >= 1.9`.
    pub bound: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticSummary {
    pub kind: String,
    pub csv: String,
    pub pass: bool,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Constants {
    pub dim: usize,
    pub lambda_hat: f64,
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
    /// Interaction weight in `Υ`.
    pub c0: f64,
    /// ODE horizon `T̃` for the schedule's `delta` and `delta0`, when both are set.
    pub ode_horizon: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub schema: u32,
    pub scenario: String,
    pub model: String,
    pub seed: u64,
    pub pass: bool,
    pub constants: Constants,
    pub diagnostics: Vec<DiagnosticSummary>,
}

/// Pretty JSON with keys in declaration order. Non-finite floats become `null`.
pub fn summary_json(s: &Summary) -> String {
    let mut text = serde_json::to_string_pretty(s).expect("summary serializes");
    text.push('\n');
    text
}

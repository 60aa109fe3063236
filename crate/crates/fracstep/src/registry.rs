//! Registered models, data presets and diagnostics.

use std::sync::Arc;

use fracstep_core::models::{self, Model, MODELS};
use fracstep_core::source::ZeroSource;

use crate::config::{ModelSpec, SourceOverride};
use crate::error::CliError;

pub const DIAGNOSTICS: [(&str, &str); 8] = [
    (
        "trace",
        "one run with V, Q and the Glimm functional recorded at every source step",
    ),
    (
        "limit",
        "runs with s = s0·2^-k, successive distances and the t² bound",
    ),
    (
        "commutation",
        "‖S_t P_t u − P_t S_t u‖ over a list of t, with its fitted order",
    ),
    (
        "tangent",
        "‖F_t u − S_t u − t·G(u)‖/t over a list of t, with its fitted order",
    ),
    (
        "sensitivity",
        "distance to the model with one parameter perturbed",
    ),
    (
        "characterization",
        "local comparison with the Riemann fan and the linearized solution",
    ),
    (
        "entropy",
        "entropy residuals against hat test functions under refinement",
    ),
    (
        "rescaling",
        "deviation from the hyperbolic rescaling identity of the homogeneous tracking",
    ),
];

pub const PRESETS: [(&str, &str); 4] = [
    (
        "riemann",
        "two constant states meeting at a point, cut off at a given width",
    ),
    ("bump", "one constant state on an interval"),
    ("random", "seeded random jumps on a symmetric interval"),
    ("steps", "explicit breakpoints with one value per interval"),
];

pub fn listing(what: &str) -> Result<Vec<(&'static str, &'static str)>, CliError> {
    match what {
        "models" => Ok(MODELS.to_vec()),
        "diagnostics" => Ok(DIAGNOSTICS.to_vec()),
        "presets" => Ok(PRESETS.to_vec()),
        _ => Err(unknown(what, &["models", "diagnostics", "presets"])),
    }
}

fn all_ids() -> Vec<&'static str> {
    MODELS
        .iter()
        .chain(&DIAGNOSTICS)
        .chain(&PRESETS)
        .map(|(id, _)| *id)
        .collect()
}

/// The error for an unknown id, with the closest known one if it is close.
pub fn unknown(id: &str, known: &[&str]) -> CliError {
    let suggestion = known
        .iter()
        .map(|k| (strsim::levenshtein(id, k), *k))
        .filter(|(d, k)| *d <= (k.len() / 2).max(2))
        .min()
        .map(|(_, k)| k.to_string());
    CliError::UnknownId {
        id: id.into(),
        suggestion,
    }
}

pub fn build_model(spec: &ModelSpec) -> Result<Model, CliError> {
    let mut m = match spec.id.as_str() {
        "radiating_gas" => models::radiating_gas(spec.params.radiating())?,
        "rosenau" => models::rosenau(spec.params.rosenau())?,
        "scalar_rosenau" | "local" | "nonautonomous" => models::by_id(&spec.id)?,
        other => return Err(unknown(other, &MODELS.map(|(id, _)| id))),
    };
    if spec.source == SourceOverride::Zero {
        m.source = Arc::new(ZeroSource {
            dim: m.system.dim(),
        });
    }
    Ok(m)
}

/// Human-readable description of a model, diagnostic or preset.
pub fn describe(id: &str) -> Result<String, CliError> {
    if let Some((_, doc)) = MODELS.iter().find(|(k, _)| *k == id) {
        let m = models::by_id(id)?;
        let c = m.source.constants();
        let omega: Vec<String> = m
            .system
            .omega()
            .as_slice()
            .iter()
            .map(|w| format!("{w}"))
            .collect();
        return Ok(format!(
            "{id}: {doc}\n  components: {}\n  box half-widths: {}\n  speed bound: {}\n  interaction weight C0: {}\n  source: {}\n  L1 = {}, L2 = {}, L3 = {}\n",
            m.system.dim(),
            omega.join(", "),
            m.system.lambda_hat(),
            m.system.c0,
            m.source.name(),
            c.l1,
            c.l2,
            c.l3
        ));
    }
    if let Some((_, doc)) = DIAGNOSTICS.iter().chain(&PRESETS).find(|(k, _)| *k == id) {
        return Ok(format!("{id}: {doc}\n"));
    }
    Err(unknown(id, &all_ids()))
}

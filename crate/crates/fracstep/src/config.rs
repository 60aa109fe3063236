//! Scenario files (TOML). See `docs/scenario.md` for the schema.

use std::path::{Path, PathBuf};

use fracstep_core::models::{EulerParams, RadiatingGasParams, RosenauParams};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema: u32,
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    /// Output directory, relative to the scenario file.
    pub out: Option<PathBuf>,
    pub model: ModelSpec,
    pub datum: Datum,
    pub schedule: Schedule,
    #[serde(default)]
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceOverride {
    /// The model's own source.
    Model,
    /// No source: the homogeneous system.
    Zero,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub id: String,
    #[serde(default = "default_source")]
    pub source: SourceOverride,
    #[serde(default)]
    pub params: ModelParams,
}

fn default_source() -> SourceOverride {
    SourceOverride::Model
}

/// Optional parameter overrides; unused fields are ignored by models that
/// do not have them.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub mu: Option<f64>,
    pub lambda: Option<f64>,
    pub m: Option<f64>,
    pub s: Option<f64>,
    pub eps: Option<f64>,
    pub gamma: Option<f64>,
    pub cv: Option<f64>,
    pub rho_bar: Option<f64>,
    pub e_bar: Option<f64>,
    pub half_width: Option<f64>,
}

impl ModelParams {
    pub fn gas(&self) -> EulerParams {
        let d = EulerParams::default();
        EulerParams {
            gamma: self.gamma.unwrap_or(d.gamma),
            cv: self.cv.unwrap_or(d.cv),
            rho_bar: self.rho_bar.unwrap_or(d.rho_bar),
            e_bar: self.e_bar.unwrap_or(d.e_bar),
        }
    }

    pub fn radiating(&self) -> RadiatingGasParams {
        let d = RadiatingGasParams::default();
        RadiatingGasParams {
            a: self.a.unwrap_or(d.a),
            b: self.b.unwrap_or(d.b),
            gas: self.gas(),
            half_width: self.half_width.unwrap_or(d.half_width),
        }
    }

    pub fn rosenau(&self) -> RosenauParams {
        let d = RosenauParams::default();
        RosenauParams {
            mu: self.mu.unwrap_or(d.mu),
            lambda: self.lambda.unwrap_or(d.lambda),
            m: self.m.unwrap_or(d.m),
            s: self.s.unwrap_or(d.s),
            eps: self.eps.unwrap_or(d.eps),
            gas: self.gas(),
            half_width: self.half_width.unwrap_or(d.half_width),
        }
    }

    /// Adds `delta` to the named parameter.
    pub fn perturbed(&self, name: &str, delta: f64, base: f64) -> Option<Self> {
        let mut p = self.clone();
        let slot = match name {
            "a" => &mut p.a,
            "b" => &mut p.b,
            "mu" => &mut p.mu,
            "lambda" => &mut p.lambda,
            "m" => &mut p.m,
            "s" => &mut p.s,
            "eps" => &mut p.eps,
            _ => return None,
        };
        *slot = Some(slot.unwrap_or(base) + delta);
        Some(p)
    }
}

/// Initial data. Vector values have one entry per component; a scalar is
/// accepted for one-component models.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Datum {
    /// `left` on `[at − width, at)`, `right` on `[at, at + width)`.
    Riemann {
        left: Values,
        right: Values,
        #[serde(default)]
        at: f64,
        width: f64,
    },
    /// `value` on `[a, b)`.
    Bump { a: f64, b: f64, value: Values },
    /// Seeded random jumps on `[−half_width, half_width]`.
    Random {
        jumps: usize,
        amplitude: Values,
        half_width: f64,
    },
    /// `values[i]` on `[breaks[i], breaks[i + 1])`, zero outside.
    Steps {
        breaks: Vec<f64>,
        values: Vec<Values>,
    },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Values {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl Values {
    pub fn to_vec(&self, dim: usize) -> Option<Vec<f64>> {
        match self {
            Values::Scalar(x) if dim == 1 => Some(vec![*x]),
            Values::Scalar(_) => None,
            Values::Vector(v) if v.len() == dim => Some(v.clone()),
            Values::Vector(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Schedule {
    /// Final time.
    pub t: f64,
    /// Source step; defaults to `t/8`.
    pub s: Option<f64>,
    pub eps: f64,
    pub n: usize,
    /// Admission bound `Υ < δ + C·t`; both or neither.
    pub delta: Option<f64>,
    pub c: Option<f64>,
    /// Radius of the ODE domain `𝒰_{δ₀}`; with `delta` it fixes the reported `T̃`.
    pub delta0: Option<f64>,
}

impl Schedule {
    pub fn step(&self) -> f64 {
        self.s.unwrap_or(self.t / 8.0)
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Diagnostic {
    /// One run with the Glimm functionals recorded at every step.
    Trace {},
    /// Runs with `s = s0·2^{−k}` and their pairwise distances.
    Limit {
        #[serde(default = "default_levels")]
        levels: usize,
        /// Defaults to `t²/2`.
        s0: Option<f64>,
        #[serde(default = "one")]
        constant: f64,
    },
    Commutation {
        t_list: Vec<f64>,
        #[serde(default = "default_commutation_slope")]
        min_slope: f64,
    },
    Tangent {
        t_list: Vec<f64>,
        #[serde(default = "default_refine")]
        refine: u32,
        #[serde(default = "default_tangent_slope")]
        min_slope: f64,
    },
    /// Distance to the model with `param` shifted by each delta.
    Sensitivity {
        param: String,
        deltas: Vec<f64>,
        #[serde(default)]
        t_list: Vec<f64>,
        #[serde(default = "default_slope_tolerance")]
        slope_tolerance: f64,
    },
    Characterization {
        xi: f64,
        windows: Vec<[f64; 2]>,
        thetas: Vec<f64>,
        #[serde(default = "default_refine")]
        refine: u32,
        #[serde(default = "default_sharp_fraction")]
        sharp_fraction: f64,
        #[serde(default = "one")]
        flat_constant: f64,
    },
    Entropy {
        levels: Vec<f64>,
        /// Refinements as `[eps, s]` pairs, coarsest first.
        refinements: Vec<[f64; 2]>,
        #[serde(default = "default_hats")]
        hats: [usize; 2],
        x_range: [f64; 2],
        #[serde(default = "default_entropy_bound")]
        max_positive: f64,
    },
    Rescaling {
        lambdas: Vec<f64>,
        #[serde(default = "default_rescaling_bound")]
        bound: f64,
    },
}

fn default_levels() -> usize {
    5
}
fn one() -> f64 {
    1.0
}
fn default_commutation_slope() -> f64 {
    1.9
}
fn default_tangent_slope() -> f64 {
    0.9
}
fn default_refine() -> u32 {
    3
}
fn default_slope_tolerance() -> f64 {
    0.1
}
fn default_sharp_fraction() -> f64 {
    0.05
}
fn default_hats() -> [usize; 2] {
    [8, 32]
}
fn default_entropy_bound() -> f64 {
    1e-3
}
fn default_rescaling_bound() -> f64 {
    1e-10
}

impl Diagnostic {
    pub fn kind(&self) -> &'static str {
        match self {
            Diagnostic::Trace {} => "trace",
            Diagnostic::Limit { .. } => "limit",
            Diagnostic::Commutation { .. } => "commutation",
            Diagnostic::Tangent { .. } => "tangent",
            Diagnostic::Sensitivity { .. } => "sensitivity",
            Diagnostic::Characterization { .. } => "characterization",
            Diagnostic::Entropy { .. } => "entropy",
            Diagnostic::Rescaling { .. } => "rescaling",
        }
    }
}

impl Scenario {
    pub fn parse(text: &str, path: &Path) -> Result<Self, CliError> {
        let sc: Scenario = toml::from_str(text).map_err(|e| CliError::Config {
            path: path.into(),
            message: e.to_string(),
        })?;
        sc.validate().map_err(|message| CliError::Config {
            path: path.into(),
            message,
        })?;
        Ok(sc)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.into(),
            source,
        })?;
        Self::parse(&text, path)
    }

    fn validate(&self) -> Result<(), String> {
        if self.schema != 1 {
            return Err(format!("unsupported schema {}", self.schema));
        }
        let s = &self.schedule;
        if !(s.t > 0.0 && s.eps > 0.0 && s.n >= 1 && s.step() > 0.0) {
            return Err("schedule needs t > 0, s > 0, eps > 0, n >= 1".into());
        }
        if s.delta.is_some() != s.c.is_some() {
            return Err("schedule.delta and schedule.c go together".into());
        }
        if let Some(d0) = s.delta0 {
            match s.delta {
                Some(d) if d0 > d => {}
                _ => return Err("schedule.delta0 needs schedule.delta < delta0".into()),
            }
        }
        Ok(())
    }
}

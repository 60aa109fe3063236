//! Concrete models: radiating gas, Rosenau-regularized Euler, scalar nonlocal
//! Burgers, local sources and the non-autonomous clock augmentation.

mod advection;
mod augmented;
mod burgers;
mod euler;

pub use advection::LinearAdvection;
pub use augmented::Augmented;
pub use burgers::{Burgers, ConvexFlux};
pub use euler::{Euler, EulerParams, Primitive};

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::pcfn::{ExpKernel, PcFn};
use crate::source::conv::sampled_lipschitz;
use crate::source::{
    validate_constants, ClockedSource, ConvolutionSource, KernelEntry, LocalSource,
    ModulatedSource, PointMap, SourceOp, TimeSource,
};
use crate::state::State;
use crate::system::{HyperbolicSystem, SystemModel};

/// A system together with its source.
#[derive(Clone)]
pub struct Model {
    pub id: String,
    pub system: SystemModel,
    pub source: Arc<dyn SourceOp>,
}

impl core::fmt::Debug for Model {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Model")
            .field("id", &self.id)
            .field("system", &self.system)
            .finish()
    }
}

/// Registered model identifiers with one-line descriptions.
pub const MODELS: [(&str, &str); 5] = [
    (
        "radiating_gas",
        "Euler equations with the radiative source b(−θ⁴ + √a·Q_a ∗ θ⁴) on the energy",
    ),
    (
        "rosenau",
        "Euler equations with Rosenau's nonlocal regularization of momentum and energy",
    ),
    (
        "scalar_rosenau",
        "Burgers equation with G(u) = −u + Q ∗ u, Q = ½e^{−|x|}",
    ),
    (
        "local",
        "Burgers equation with the local source g(x, u) = −χ_{x>0}·u",
    ),
    (
        "nonautonomous",
        "scalar_rosenau modulated by 1 + ½sin t, written as an autonomous clocked system",
    ),
];

/// Half-width of the admissible box for the Euler models.
pub const EULER_BOX: f64 = 0.05;
/// Half-width of the admissible box for the scalar models.
pub const SCALAR_BOX: f64 = 4.0;
/// Safety factor on sampled Lipschitz constants.
pub const LIP_MARGIN: f64 = 1.1;

fn scalar_system() -> Result<SystemModel> {
    calibrated(SystemModel::new(
        Arc::new(Burgers),
        State::scalar(SCALAR_BOX),
        None,
    )?)
}

/// Sets `C₀` from sampled interactions.
fn calibrated(system: SystemModel) -> Result<SystemModel> {
    let c0 = system.calibrated_c0()?;
    Ok(system.with_c0(c0))
}

fn euler_system(params: EulerParams, half_width: f64) -> Result<(Euler, SystemModel)> {
    let eu = Euler::new(params)?;
    let omega = State::from_slice(&[half_width; 3]);
    let sys = calibrated(SystemModel::new(Arc::new(eu), omega, None)?)?;
    Ok((eu, sys))
}

/// Relative slack when checking declared source constants on probes.
pub const PROBE_SLACK: f64 = 1e-8;

/// Deterministic probes inside `Ω` for the (G) check.
pub fn probes(omega: &State) -> Vec<PcFn> {
    (0..6)
        .map(|k| {
            let kf = k as f64;
            let a = omega.map(|w| 0.5 * w * if k % 2 == 0 { 1.0 } else { -0.6 });
            let b = State::from_slice(
                &omega
                    .as_slice()
                    .iter()
                    .enumerate()
                    .map(|(i, w)| 0.3 * w * if (k + i) % 3 == 0 { -1.0 } else { 0.8 })
                    .collect::<Vec<_>>(),
            );
            PcFn::from_raw(
                omega.len(),
                alloc::vec![-1.0 + 0.2 * kf, 0.1 * kf, 0.7 + 0.2 * kf],
                alloc::vec![State::zeros(omega.len()), a, b, State::zeros(omega.len())],
            )
        })
        .collect()
}

/// Assemble a model after checking the declared source constants on [`probes`].
fn checked(id: &str, system: SystemModel, source: Arc<dyn SourceOp>) -> Result<Model> {
    validate_constants(source.as_ref(), &probes(system.omega()), PROBE_SLACK)?;
    Ok(Model {
        id: String::from(id),
        system,
        source,
    })
}

/// `G(u) = −u + Q ∗ u`, `Q = ½e^{−|x|}`.
pub fn scalar_rosenau_source() -> Result<ConvolutionSource> {
    let g: PointMap = Arc::new(|u: &State| -*u);
    let h: PointMap = Arc::new(|u: &State| *u);
    let k = KernelEntry {
        row: 0,
        col: 0,
        kernel: ExpKernel::single(0.5, 1.0)?,
    };
    ConvolutionSource::new("scalar_rosenau", 1, g, h, alloc::vec![k], 1.0, 1.0)
}

/// Burgers with `G(u) = −u + Q ∗ u`; `L₁ = L₂ = 2`, `L₃ = 0`.
pub fn scalar_rosenau() -> Result<Model> {
    checked(
        "scalar_rosenau",
        scalar_system()?,
        Arc::new(scalar_rosenau_source()?),
    )
}

/// Pure Burgers with no source.
pub fn burgers() -> Result<Model> {
    checked(
        "burgers",
        scalar_system()?,
        Arc::new(crate::source::ZeroSource { dim: 1 }),
    )
}

/// Radiating-gas parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiatingGasParams {
    pub a: f64,
    pub b: f64,
    pub gas: EulerParams,
    pub half_width: f64,
}

impl Default for RadiatingGasParams {
    fn default() -> Self {
        RadiatingGasParams {
            a: 1.0,
            b: 1.0,
            gas: EulerParams::default(),
            half_width: EULER_BOX,
        }
    }
}

/// Euler with energy source `b(−θ⁴ + √a·Q_a ∗ θ⁴)`, `Q_a = ½e^{−√a|x|}`.
pub fn radiating_gas(p: RadiatingGasParams) -> Result<Model> {
    let (eu, system) = euler_system(p.gas, p.half_width)?;
    let src = radiating_source(p, eu, &system)?;
    checked("radiating_gas", system, Arc::new(src))
}

/// The radiating-gas source alone.
pub fn radiating_gas_source(p: RadiatingGasParams) -> Result<ConvolutionSource> {
    let (eu, system) = euler_system(p.gas, p.half_width)?;
    radiating_source(p, eu, &system)
}

fn radiating_source(
    p: RadiatingGasParams,
    eu: Euler,
    system: &SystemModel,
) -> Result<ConvolutionSource> {
    if !(p.a > 0.0) || !(p.b >= 0.0) {
        return Err(Error::InvalidParameter(alloc::format!(
            "radiating gas needs a > 0, b ≥ 0: {p:?}"
        )));
    }
    let theta4 = crate::math::powf(eu.base_temperature(), 4.0);
    let h: PointMap = Arc::new(move |u: &State| {
        let t = eu.temperature(u);
        State::from_slice(&[0.0, 0.0, t * t * t * t - theta4])
    });
    let b = p.b;
    let hh = h.clone();
    let g: PointMap = Arc::new(move |u: &State| hh(u) * -b);
    let lip_h = sampled_lipschitz(&h, system.omega(), LIP_MARGIN);
    let sa = crate::math::sqrt(p.a);
    let kernels = if b > 0.0 {
        alloc::vec![KernelEntry {
            row: 2,
            col: 2,
            kernel: ExpKernel::single(0.5 * b * sa, sa)?
        }]
    } else {
        Vec::new()
    };
    ConvolutionSource::new("radiating_gas", 3, g, h, kernels, b * lip_h, lip_h)
}

/// Rosenau regularization parameters (`lambda` is the heat coefficient).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RosenauParams {
    pub mu: f64,
    pub lambda: f64,
    pub m: f64,
    pub s: f64,
    pub eps: f64,
    pub gas: EulerParams,
    pub half_width: f64,
}

impl Default for RosenauParams {
    fn default() -> Self {
        RosenauParams {
            mu: 0.1,
            lambda: 0.1,
            m: 1.0,
            s: 1.0,
            eps: 1.0,
            gas: EulerParams::default(),
            half_width: EULER_BOX,
        }
    }
}

/// Euler with momentum source `ε⁻²(−(μ/m)v + μ_* ∗ v)` and energy source
/// `ε⁻²(−(λ/s)θ + λ_* ∗ θ)`, `μ_* = (μ/2mε)e^{−|x|/ε}`, `λ_* = (λ/2sε)e^{−|x|/ε}`.
pub fn rosenau(p: RosenauParams) -> Result<Model> {
    if !(p.mu >= 0.0 && p.lambda >= 0.0 && p.m > 0.0 && p.s > 0.0 && p.eps > 0.0) {
        return Err(Error::InvalidParameter(alloc::format!(
            "invalid Rosenau parameters {p:?}"
        )));
    }
    let (eu, system) = euler_system(p.gas, p.half_width)?;
    let theta_bar = eu.base_temperature();
    let e2 = p.eps * p.eps;
    let (cm, cl) = (p.mu / (p.m * e2), p.lambda / (p.s * e2));
    let h: PointMap = Arc::new(move |u: &State| {
        State::from_slice(&[0.0, eu.velocity(u), eu.temperature(u) - theta_bar])
    });
    let hh = h.clone();
    let g: PointMap = Arc::new(move |u: &State| {
        let v = hh(u);
        State::from_slice(&[0.0, -cm * v[1], -cl * v[2]])
    });
    let rate = 1.0 / p.eps;
    let mut kernels = Vec::new();
    if cm > 0.0 {
        kernels.push(KernelEntry {
            row: 1,
            col: 1,
            kernel: ExpKernel::single(0.5 * cm * rate, rate)?,
        });
    }
    if cl > 0.0 {
        kernels.push(KernelEntry {
            row: 2,
            col: 2,
            kernel: ExpKernel::single(0.5 * cl * rate, rate)?,
        });
    }
    let lip_g = sampled_lipschitz(&g, system.omega(), LIP_MARGIN);
    let lip_h = sampled_lipschitz(&h, system.omega(), LIP_MARGIN);
    let src = ConvolutionSource::new("rosenau", 3, g, h, kernels, lip_g, lip_h)?;
    checked("rosenau", system, Arc::new(src))
}

/// Burgers with `g(x, u) = −χ_{x>0}·u`; the measure is an atom at 0 of mass
/// `sup_Ω |u|`.
pub fn local() -> Result<Model> {
    let system = scalar_system()?;
    let off: PointMap = Arc::new(|u: &State| *u * 0.0);
    let on: PointMap = Arc::new(|u: &State| -*u);
    let src = LocalSource::new(
        "local",
        alloc::vec![0.0],
        alloc::vec![off, on],
        1.0,
        alloc::vec![SCALAR_BOX],
        system.omega(),
    )?;
    checked("local", system, Arc::new(src))
}

/// Half-width of the clock component's box.
pub const CLOCK_BOX: f64 = 4.0;

/// Time-dependent source made autonomous: the returned system carries an
/// extra linearly degenerate field at the inner speed bound.
pub fn nonautonomous(inner: &Model, time_source: Arc<dyn TimeSource>) -> Result<Model> {
    let n = inner.system.dim();
    if time_source.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: time_source.dim(),
        });
    }
    let speed = inner.system.lambda_hat();
    let sys: Arc<dyn HyperbolicSystem> =
        Arc::new(Augmented::new(inner.system.system().clone(), speed));
    let omega = inner.system.omega().push(CLOCK_BOX);
    let system = calibrated(SystemModel::new(sys, omega, None)?)?;
    checked(
        "nonautonomous",
        system,
        Arc::new(ClockedSource::new(time_source)),
    )
}

/// The registered non-autonomous example: `(1 + ½ sin t)(−u + Q ∗ u)`.
pub fn nonautonomous_example() -> Result<Model> {
    let inner = scalar_rosenau()?;
    let ts = ModulatedSource {
        base: inner.source.clone(),
        factor: Arc::new(|t: f64| 1.0 + 0.5 * libm::sin(t)),
        factor_sup: 1.5,
        factor_lip: 0.5,
        state_bound: 2.0 * SCALAR_BOX,
    };
    nonautonomous(&inner, Arc::new(ts))
}

/// Linear advection with constant speeds and no source.
pub fn linear_advection(speeds: Vec<f64>, half_width: f64) -> Result<Model> {
    let n = speeds.len();
    let sys = LinearAdvection::new(speeds)?;
    let system = calibrated(SystemModel::new(
        Arc::new(sys),
        State::from_slice(&alloc::vec![half_width; n]),
        None,
    )?)?;
    checked(
        "linear_advection",
        system,
        Arc::new(crate::source::ZeroSource { dim: n }),
    )
}

/// Build a registered model with default parameters.
pub fn by_id(id: &str) -> Result<Model> {
    match id {
        "radiating_gas" => radiating_gas(RadiatingGasParams::default()),
        "rosenau" => rosenau(RosenauParams::default()),
        "scalar_rosenau" => scalar_rosenau(),
        "local" => local(),
        "nonautonomous" => nonautonomous_example(),
        _ => Err(Error::InvalidParameter(alloc::format!(
            "unknown model id {id}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_registered_model_builds() {
        for (id, _) in MODELS {
            let m = by_id(id).unwrap();
            assert_eq!(m.id, id);
            assert_eq!(m.source.dim(), m.system.dim());
        }
    }

    #[test]
    fn scalar_rosenau_constants() {
        let c = scalar_rosenau().unwrap().source.constants();
        assert_eq!((c.l1, c.l2, c.l3), (2.0, 2.0, 0.0));
    }

    #[test]
    fn radiating_kernel_has_unit_mass() {
        // √a·Q_a integrates to one, so b·√a·Q_a has mass b
        let a: f64 = 2.5;
        let k = ExpKernel::single(0.5 * a.sqrt(), a.sqrt()).unwrap();
        assert!((k.mass() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn constant_temperature_gives_zero_source() {
        let m = radiating_gas(RadiatingGasParams::default()).unwrap();
        let g = m.source.apply(&PcFn::zero(3)).unwrap();
        assert_eq!(g.project(4), PcFn::zero(3));
    }

    #[test]
    fn zero_coupling_gives_zero_source() {
        let m = radiating_gas(RadiatingGasParams {
            b: 0.0,
            ..Default::default()
        })
        .unwrap();
        let u = PcFn::indicator(0.0, 1.0, State::from_slice(&[0.01, 0.0, 0.02])).unwrap();
        assert_eq!(m.source.apply(&u).unwrap().project(4), PcFn::zero(3));
        let c = m.source.constants();
        assert_eq!((c.l1, c.l2), (0.0, 0.0));
    }

    #[test]
    fn rosenau_without_coefficients_is_pure_euler() {
        let m = rosenau(RosenauParams {
            mu: 0.0,
            lambda: 0.0,
            ..Default::default()
        })
        .unwrap();
        let u = PcFn::indicator(0.0, 1.0, State::from_slice(&[0.01, 0.02, 0.0])).unwrap();
        assert_eq!(m.source.apply(&u).unwrap().project(4), PcFn::zero(3));
    }

    #[test]
    fn rosenau_scales_with_inverse_eps_squared() {
        let u = PcFn::indicator(-0.5, 0.5, State::from_slice(&[0.0, 0.02, 0.01])).unwrap();
        let a = rosenau(RosenauParams {
            eps: 1.0,
            ..Default::default()
        })
        .unwrap();
        let b = rosenau(RosenauParams {
            eps: 0.5,
            ..Default::default()
        })
        .unwrap();
        // local part only: scaling is exact
        let la = a.source.apply(&u).unwrap().local;
        let lb = b.source.apply(&u).unwrap().local;
        assert!(lb.l1_dist(&la.scale(4.0)).unwrap() < 1e-15);
    }

    #[test]
    fn unknown_id_rejected() {
        assert!(by_id("nope").is_err());
    }

    #[test]
    fn clock_integrates_to_time() {
        let m = nonautonomous_example().unwrap();
        let u = PcFn::zero(2);
        let g = m.source.apply(&u).unwrap();
        let w = g.project(4).integral();
        assert!((w[1] - 1.0).abs() < 1e-15);
    }
}

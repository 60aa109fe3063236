//! Source operators `G` with declared constants `(L₁, L₂, L₃)`, the Euler
//! step `P_s`, and the ODE flow `Σ_t`.

pub(crate) mod conv;
mod local;
mod nonauto;

pub use conv::{ConvolutionSource, KernelEntry, PointMap, QuadKernelEntry};
pub use local::LocalSource;
pub use nonauto::{ClockedSource, ModulatedSource, TimeSource};

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::pcfn::{Field, PcFn};

/// Constants of the Lipschitz and total-variation bounds
/// `‖G(u)−G(w)‖ ≤ L₁‖u−w‖`, `TV(G(u)) ≤ L₂·TV(u) + L₃`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceConstants {
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceKind {
    Convolution,
    Local,
    NonautonomousAugmented,
    Zero,
}

/// An operator `u ↦ G(u)` on piecewise-constant data.
pub trait SourceOp: Send + Sync {
    fn name(&self) -> &str;
    fn dim(&self) -> usize;
    fn kind(&self) -> SourceKind;
    fn constants(&self) -> SourceConstants;
    /// Exact (or quadrature, see [`SourceOp::is_approximate`]) value of `G(u)`.
    fn apply(&self, u: &PcFn) -> Result<Field>;
    fn is_approximate(&self) -> bool {
        false
    }
}

/// The zero source.
#[derive(Debug, Clone, Copy)]
pub struct ZeroSource {
    pub dim: usize,
}

impl SourceOp for ZeroSource {
    fn name(&self) -> &str {
        "zero"
    }
    fn dim(&self) -> usize {
        self.dim
    }
    fn kind(&self) -> SourceKind {
        SourceKind::Zero
    }
    fn constants(&self) -> SourceConstants {
        SourceConstants {
            l1: 0.0,
            l2: 0.0,
            l3: 0.0,
        }
    }
    fn apply(&self, u: &PcFn) -> Result<Field> {
        check_dim(self.dim, u)?;
        Ok(Field::zero(self.dim))
    }
}

pub(crate) fn check_dim(dim: usize, u: &PcFn) -> Result<()> {
    if u.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: u.dim(),
        });
    }
    Ok(())
}

/// `Π_N(G(u))`.
pub fn apply_g(src: &dyn SourceOp, u: &PcFn, n: usize) -> Result<PcFn> {
    Ok(src.apply(u)?.project(n))
}

/// The Euler step `P_s u = u + s·Π_N G(u)`.
pub fn euler_step(src: &dyn SourceOp, u: &PcFn, s: f64, n: usize) -> Result<PcFn> {
    if !(s >= 0.0) {
        return Err(Error::InvalidParameter(alloc::format!("negative step {s}")));
    }
    if s == 0.0 {
        return Ok(u.clone());
    }
    u.lincomb(1.0, &apply_g(src, u, n)?, s)
}

/// Domain data for the ODE flow: `u` ranges in `𝒰_{δ₀}` starting from `𝒰_δ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeDomain {
    pub delta0: f64,
    pub delta: f64,
}

/// `T̃ = min{(δ₀−δ)/(δ₀L₂+L₃), 1/(L₁+1)}`.
pub fn ode_horizon(c: &SourceConstants, dom: &OdeDomain) -> f64 {
    let a = if dom.delta0 * c.l2 + c.l3 > 0.0 {
        (dom.delta0 - dom.delta) / (dom.delta0 * c.l2 + c.l3)
    } else {
        f64::INFINITY
    };
    a.min(1.0 / (c.l1 + 1.0))
}

/// The flow `Σ_t` of `∂_t u = Π_N G(u)` by classical RK4 with `substeps` steps.
/// Refuses horizons beyond `T̃`.
pub fn ode_flow(
    src: &dyn SourceOp,
    u: &PcFn,
    t: f64,
    substeps: usize,
    n: usize,
    dom: &OdeDomain,
) -> Result<PcFn> {
    let t_max = ode_horizon(&src.constants(), dom);
    if t > t_max {
        return Err(Error::HorizonExceeded { t, t_max });
    }
    if t == 0.0 {
        return Ok(u.clone());
    }
    let m = substeps.max(1);
    let h = t / m as f64;
    let rhs = |v: &PcFn| apply_g(src, v, n);
    let mut v = u.clone();
    for _ in 0..m {
        let k1 = rhs(&v)?;
        let k2 = rhs(&v.lincomb(1.0, &k1, 0.5 * h)?)?;
        let k3 = rhs(&v.lincomb(1.0, &k2, 0.5 * h)?)?;
        let k4 = rhs(&v.lincomb(1.0, &k3, h)?)?;
        let incr = k1
            .lincomb(1.0, &k2, 2.0)?
            .lincomb(1.0, &k3.lincomb(2.0, &k4, 1.0)?, 1.0)?;
        v = v.lincomb(1.0, &incr, h / 6.0)?;
    }
    Ok(v)
}

/// Measured ratios of hypothesis (G) on probe pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasuredConstants {
    /// `max ‖G(u)−G(w)‖/‖u−w‖`.
    pub lipschitz: f64,
    /// `max (TV(G(u)) − L₃)/TV(u)` over nonconstant probes.
    pub tv_ratio: f64,
}

/// Measure the (G) ratios on the given probes.
pub fn measure_constants(src: &dyn SourceOp, probes: &[PcFn]) -> Result<MeasuredConstants> {
    let c = src.constants();
    let fields: Vec<Field> = probes.iter().map(|u| src.apply(u)).collect::<Result<_>>()?;
    let mut lipschitz: f64 = 0.0;
    let mut tv_ratio: f64 = 0.0;
    for (i, u) in probes.iter().enumerate() {
        let tv = u.tv();
        if tv > 0.0 {
            tv_ratio = tv_ratio.max((fields[i].tv() - c.l3) / tv);
        }
        if i + 1 < probes.len() {
            let d = u.l1_dist(&probes[i + 1])?;
            if d > 0.0 {
                lipschitz = lipschitz.max(fields[i].sub(&fields[i + 1])?.l1_norm() / d);
            }
        }
    }
    Ok(MeasuredConstants {
        lipschitz,
        tv_ratio,
    })
}

/// Check measured ratios against the declared constants with a relative slack.
pub fn validate_constants(
    src: &dyn SourceOp,
    probes: &[PcFn],
    slack: f64,
) -> Result<MeasuredConstants> {
    let m = measure_constants(src, probes)?;
    let c = src.constants();
    if m.lipschitz > c.l1 * (1.0 + slack) + 1e-12 {
        return Err(Error::ConstantViolated {
            name: "L1",
            measured: m.lipschitz,
            declared: c.l1,
        });
    }
    if m.tv_ratio > c.l2 * (1.0 + slack) + 1e-12 {
        return Err(Error::ConstantViolated {
            name: "L2",
            measured: m.tv_ratio,
            declared: c.l2,
        });
    }
    Ok(m)
}

/// Shared handle to a source operator.
pub type SharedSource = Arc<dyn SourceOp>;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::State;

    /// `G(u) = a·u`.
    struct Linear(f64);
    impl SourceOp for Linear {
        fn name(&self) -> &str {
            "linear"
        }
        fn dim(&self) -> usize {
            1
        }
        fn kind(&self) -> SourceKind {
            SourceKind::Local
        }
        fn constants(&self) -> SourceConstants {
            SourceConstants {
                l1: self.0.abs(),
                l2: self.0.abs(),
                l3: 0.0,
            }
        }
        fn apply(&self, u: &PcFn) -> Result<Field> {
            Ok(Field::from_local(u.scale(self.0)))
        }
    }

    fn bump() -> PcFn {
        PcFn::scalar(&[0.0, 0.5, 1.0], &[1.0, -0.5]).unwrap()
    }

    #[test]
    fn zero_source_step_is_identity() {
        let z = ZeroSource { dim: 1 };
        assert_eq!(euler_step(&z, &bump(), 0.3, 4).unwrap(), bump());
    }

    #[test]
    fn identity_source_scales() {
        let u = bump();
        let p = euler_step(&Linear(1.0), &u, 0.25, 4).unwrap();
        assert!(p.l1_dist(&u.scale(1.25)).unwrap() < 1e-15);
    }

    #[test]
    fn decay_flow_matches_exponential() {
        let u = bump();
        let dom = OdeDomain {
            delta0: 10.0,
            delta: 1.0,
        };
        let v = ode_flow(&Linear(-1.0), &u, 0.4, 32, 4, &dom).unwrap();
        let exact = u.scale((-0.4f64).exp());
        let d = v.l1_dist(&exact).unwrap();
        assert!(d < 1e-8, "{d} {v:?}");
    }

    #[test]
    fn ode_flow_refuses_long_horizon() {
        let dom = OdeDomain {
            delta0: 10.0,
            delta: 1.0,
        };
        let e = ode_flow(&Linear(-1.0), &bump(), 0.6, 8, 4, &dom).unwrap_err();
        assert_eq!(e, Error::HorizonExceeded { t: 0.6, t_max: 0.5 });
    }

    #[test]
    fn negative_step_rejected() {
        assert!(euler_step(&Linear(1.0), &bump(), -0.1, 4).is_err());
    }

    #[test]
    fn field_of_state_is_projected() {
        let u = PcFn::indicator(0.1, 0.4, State::scalar(1.0)).unwrap();
        let g = apply_g(&Linear(2.0), &u, 2).unwrap();
        assert!((g.eval(0.25)[0] - 1.2).abs() < 1e-15);
    }
}

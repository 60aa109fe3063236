use alloc::string::String;
use alloc::sync::Arc;

use super::{check_dim, SourceConstants, SourceKind, SourceOp};
use crate::error::Result;
use crate::pcfn::{Field, PcFn};
use crate::state::State;

/// A time-dependent source `G(t, u)` with constants of the time-augmented bounds
/// `‖G(t,u)−G(s,w)‖ ≤ L₁(‖u−w‖ + |t−s|)`, `TV(G(t,u)) ≤ L₂·TV(u) + L₃`.
pub trait TimeSource: Send + Sync {
    fn name(&self) -> &str;
    fn dim(&self) -> usize;
    fn constants(&self) -> SourceConstants;
    fn apply_at(&self, t: f64, u: &PcFn) -> Result<Field>;
}

/// Scalar function of time.
pub type TimeFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// `G(t, u) = a(t)·G₀(u)` for a bounded Lipschitz `a`.
#[derive(Clone)]
pub struct ModulatedSource {
    pub base: Arc<dyn SourceOp>,
    pub factor: TimeFn,
    /// `sup |a|`.
    pub factor_sup: f64,
    /// Lipschitz constant of `a`.
    pub factor_lip: f64,
    /// Bound on `‖u‖_{L¹}` over the admissible states.
    pub state_bound: f64,
}

impl TimeSource for ModulatedSource {
    fn name(&self) -> &str {
        self.base.name()
    }
    fn dim(&self) -> usize {
        self.base.dim()
    }
    fn constants(&self) -> SourceConstants {
        let c = self.base.constants();
        SourceConstants {
            l1: self.factor_sup * c.l1 + self.factor_lip * c.l1 * self.state_bound,
            l2: self.factor_sup * c.l2,
            l3: self.factor_sup * c.l3,
        }
    }
    fn apply_at(&self, t: f64, u: &PcFn) -> Result<Field> {
        Ok(self.base.apply(u)?.scale((self.factor)(t)))
    }
}

/// Autonomous source on the state `(u, w)`: `G̃(u, w) = (G(∫w, u), χ_[0,1])`.
/// Paired with a transport `∂_t w + λ̂ ∂_x w = χ_[0,1]`, `∫w` equals the time.
#[derive(Clone)]
pub struct ClockedSource {
    inner: Arc<dyn TimeSource>,
    name: String,
}

impl ClockedSource {
    pub fn new(inner: Arc<dyn TimeSource>) -> Self {
        let name = alloc::format!("clocked {}", inner.name());
        ClockedSource { inner, name }
    }

    /// Time read from the clock component.
    pub fn clock(&self, u: &PcFn) -> f64 {
        u.integral()[self.inner.dim()]
    }
}

impl SourceOp for ClockedSource {
    fn name(&self) -> &str {
        &self.name
    }
    fn dim(&self) -> usize {
        self.inner.dim() + 1
    }
    fn kind(&self) -> SourceKind {
        SourceKind::NonautonomousAugmented
    }
    fn constants(&self) -> SourceConstants {
        let c = self.inner.constants();
        SourceConstants {
            l1: crate::math::sqrt(2.0) * c.l1,
            l2: c.l2,
            l3: c.l3 + 2.0,
        }
    }
    fn apply(&self, u: &PcFn) -> Result<Field> {
        check_dim(self.dim(), u)?;
        let n = self.inner.dim();
        let t = self.clock(u);
        let inner_u = u.map(|s| s.truncate(n))?;
        let g = self.inner.apply_at(t, &inner_u)?;
        let mut one = State::zeros(n + 1);
        one[n] = 1.0;
        let local = g
            .local
            .map(|s| s.push(0.0))?
            .add(&PcFn::indicator(0.0, 1.0, one)?)?;
        let mut out = Field::from_local(local);
        out.conv = g.conv;
        out.quad = g.quad;
        Ok(out)
    }
}

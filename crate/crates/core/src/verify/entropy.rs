use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::fronttrack::{FrontState, TrackOpts, WaveFront};
use crate::math::ln;
use crate::models::{Euler, EulerParams, Model};
use crate::pcfn::PcFn;
use crate::source::apply_g;
use crate::splitting::SplitSchedule;
use crate::system::{box_samples, HyperbolicSystem, SystemModel};
use crate::{Error, Result, State};

/// A convex entropy `η` with flux `q`, `Dq = Dη·Df`.
pub trait EntropyPair: Send + Sync {
    fn dim(&self) -> usize;
    fn eta(&self, u: &State) -> f64;
    fn flux(&self, u: &State) -> f64;
    /// `Dη(u)`; any subgradient where `η` has a kink.
    fn gradient(&self, u: &State) -> State;
}

/// Kruzkov pair `|u − k|`, `sgn(u − k)(f(u) − f(k))` of a scalar law.
#[derive(Clone)]
pub struct Kruzkov {
    k: f64,
    fk: f64,
    sys: Arc<dyn HyperbolicSystem>,
}

impl core::fmt::Debug for Kruzkov {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Kruzkov")
            .field("k", &self.k)
            .field("system", &self.sys.name())
            .finish()
    }
}

impl Kruzkov {
    pub fn new(model: &SystemModel, k: f64) -> Result<Self> {
        if model.dim() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: model.dim(),
            });
        }
        let sys = model.system().clone();
        let fk = sys.flux(&State::scalar(k))[0];
        Ok(Kruzkov { k, fk, sys })
    }

    pub fn k(&self) -> f64 {
        self.k
    }
}

fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

impl EntropyPair for Kruzkov {
    fn dim(&self) -> usize {
        1
    }
    fn eta(&self, u: &State) -> f64 {
        (u[0] - self.k).abs()
    }
    fn flux(&self, u: &State) -> f64 {
        sgn(u[0] - self.k) * (self.sys.flux(u)[0] - self.fk)
    }
    fn gradient(&self, u: &State) -> State {
        State::scalar(sgn(u[0] - self.k))
    }
}

/// Physical entropy `η = −ρ c_v ln(e ρ^{1−γ})` of the Euler system, `q = vη`.
#[derive(Debug, Clone, Copy)]
pub struct EulerEntropy {
    eu: Euler,
}

impl EulerEntropy {
    pub fn new(params: EulerParams) -> Result<Self> {
        Ok(EulerEntropy {
            eu: Euler::new(params)?,
        })
    }
}

impl EntropyPair for EulerEntropy {
    fn dim(&self) -> usize {
        3
    }
    fn eta(&self, u: &State) -> f64 {
        let p = self.eu.primitive(u);
        let g = self.eu.params().gamma;
        -p.rho * self.eu.params().cv * (ln(p.e) + (1.0 - g) * ln(p.rho))
    }
    fn flux(&self, u: &State) -> f64 {
        self.eu.velocity(u) * self.eta(u)
    }
    fn gradient(&self, u: &State) -> State {
        let mut out = State::zeros(3);
        for i in 0..3 {
            let h = 1e-6;
            let e = State::unit(3, i) * h;
            out[i] = (self.eta(&(*u + e)) - self.eta(&(*u - e))) / (2.0 * h);
        }
        out
    }
}

/// Rejects `η` with a negative second difference on sample points of `Ω`.
pub fn validate_entropy(e: &dyn EntropyPair, omega: &State) -> Result<()> {
    let n = e.dim();
    if omega.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: omega.len(),
        });
    }
    let mut dirs: Vec<State> = (0..n).map(|i| State::unit(n, i) * omega[i]).collect();
    dirs.push(omega.map(|w| w));
    if n > 1 {
        let mut alt = *omega;
        alt[0] = -alt[0];
        dirs.push(alt);
    }
    for u in box_samples(&(*omega * 0.8), 32) {
        for d in &dirs {
            for h in [0.1, 0.01] {
                let step = *d * h;
                let mid = e.eta(&u);
                let second = e.eta(&(u + step)) - 2.0 * mid + e.eta(&(u - step));
                if !second.is_finite() || second < -1e-10 * (1.0 + mid.abs()) {
                    return Err(Error::NonConvexEntropy);
                }
            }
        }
    }
    Ok(())
}

/// Tensor-product hat test functions `φ_ij(t, x) = a_i(t) b_j(x)` on interior
/// nodes of two increasing grids, so every `φ_ij` vanishes near `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct HatGrid {
    pub t: Vec<f64>,
    pub x: Vec<f64>,
}

impl HatGrid {
    pub fn uniform(t_final: f64, nt: usize, a: f64, b: f64, nx: usize) -> Self {
        HatGrid {
            t: (0..=nt).map(|i| t_final * i as f64 / nt as f64).collect(),
            x: (0..=nx)
                .map(|j| a + (b - a) * j as f64 / nx as f64)
                .collect(),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = |v: &[f64]| {
            v.len() >= 3 && v.windows(2).all(|w| w[0] < w[1]) && v.iter().all(|x| x.is_finite())
        };
        if !ok(&self.t) || !ok(&self.x) || self.t[0] < 0.0 {
            return Err(Error::InvalidParameter(
                "hat grids need three increasing nodes".into(),
            ));
        }
        Ok(())
    }

    fn count(&self) -> (usize, usize) {
        (self.t.len() - 2, self.x.len() - 2)
    }
}

fn hat(nodes: &[f64], i: usize, y: f64) -> f64 {
    let (lo, mid, hi) = (nodes[i - 1], nodes[i], nodes[i + 1]);
    if y <= lo || y >= hi {
        0.0
    } else if y <= mid {
        (y - lo) / (mid - lo)
    } else {
        (hi - y) / (hi - mid)
    }
}

/// `∫_p^q` of the `i`-th hat, exact.
fn hat_integral(nodes: &[f64], i: usize, p: f64, q: f64) -> f64 {
    let mut total = 0.0;
    for (lo, hi) in [(nodes[i - 1], nodes[i]), (nodes[i], nodes[i + 1])] {
        let a = p.max(lo);
        let b = q.min(hi);
        if b > a {
            total += 0.5 * (b - a) * (hat(nodes, i, a) + hat(nodes, i, b));
        }
    }
    total
}

/// Interior hat indices whose support meets `]p, q[`.
fn hats_meeting(nodes: &[f64], p: f64, q: f64) -> core::ops::Range<usize> {
    let last = nodes.len() - 1;
    let first = nodes.partition_point(|&y| y <= p).saturating_sub(1).max(1);
    let end = nodes.partition_point(|&y| y < q).min(last);
    first..end.max(first)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyReport {
    /// Interior hat counts in `t` and `x`.
    pub shape: (usize, usize),
    /// `−∬ (ηφ_t + qφ_x + Dη·G φ)`, row-major in `(i, j)`.
    pub residuals: Vec<f64>,
    pub max_positive: f64,
    pub min: f64,
}

impl EntropyReport {
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.residuals[i * self.shape.1 + j]
    }
}

/// Entropy residual of the splitting approximation for every test function of
/// `grid`. The transport part is integrated exactly along the tracked fronts;
/// each Euler step contributes its jump of `η` minus `s·Dη·Π_N G`, with `Dη`
/// averaged across the step.
pub fn entropy_residual(
    model: &Model,
    u0: &PcFn,
    sched: &SplitSchedule,
    entropy: &dyn EntropyPair,
    grid: &HatGrid,
) -> Result<EntropyReport> {
    sched.validate()?;
    grid.validate()?;
    if entropy.dim() != model.system.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.system.dim(),
            got: entropy.dim(),
        });
    }
    let (nt, nx) = grid.count();
    let mut acc = vec![0.0; nt * nx];
    let mut opts = TrackOpts::new(sched.eps);
    opts.log_segments = true;
    let h = sched.steps();
    let rem = (sched.t_final - h as f64 * sched.s).max(0.0);
    let mut u = u0.clone();
    for k in 0..=h {
        let offset = k as f64 * sched.s;
        let dt = if k < h { sched.s } else { rem };
        if dt == 0.0 {
            break;
        }
        let mut st = FrontState::init(&model.system, &u, opts)?;
        st.evolve(dt)?;
        for (front, end) in st.segments() {
            add_front(&mut acc, grid, entropy, &front, offset, end);
        }
        if k == h {
            break;
        }
        let minus = st.snapshot();
        let g = apply_g(model.source.as_ref(), &minus, sched.n)?;
        let plus = minus.lincomb(1.0, &g, sched.s)?;
        add_source_step(
            &mut acc,
            grid,
            entropy,
            offset + sched.s,
            sched.s,
            &minus,
            &plus,
            &g,
        );
        u = plus;
    }
    let max_positive = acc.iter().fold(0.0f64, |m, &r| m.max(r));
    let min = acc.iter().fold(f64::INFINITY, |m, &r| m.min(r));
    Ok(EntropyReport {
        shape: (nt, nx),
        residuals: acc,
        max_positive,
        min,
    })
}

fn add_front(
    acc: &mut [f64],
    grid: &HatGrid,
    e: &dyn EntropyPair,
    f: &WaveFront,
    offset: f64,
    end: f64,
) {
    let t0 = offset + f.t0;
    let t1 = offset + end;
    if !(t1 > t0) {
        return;
    }
    let dissipation =
        f.speed * (e.eta(&f.right) - e.eta(&f.left)) - (e.flux(&f.right) - e.flux(&f.left));
    if dissipation == 0.0 {
        return;
    }
    let x_at = |t: f64| f.position(t - offset);
    let xa = x_at(t0);
    let nx = grid.x.len() - 2;
    for i in hats_meeting(&grid.t, t0, t1) {
        let lo = t0.max(grid.t[i - 1]);
        let hi = t1.min(grid.t[i + 1]);
        if !(hi > lo) {
            continue;
        }
        let (xl, xr) = (x_at(lo), x_at(hi));
        for j in hats_meeting(&grid.x, xl.min(xr), xl.max(xr)) {
            let mut cuts = vec![lo, hi, grid.t[i]];
            if f.speed != 0.0 {
                for node in &grid.x[j - 1..=j + 1] {
                    cuts.push(t0 + (node - xa) / f.speed);
                }
            }
            cuts.retain(|&c| c >= lo && c <= hi);
            cuts.sort_by(f64::total_cmp);
            let phi = |t: f64| hat(&grid.t, i, t) * hat(&grid.x, j, x_at(t));
            let mut integral = 0.0;
            for w in cuts.windows(2) {
                let (a, b) = (w[0], w[1]);
                if b > a {
                    integral += (b - a) / 6.0 * (phi(a) + 4.0 * phi(0.5 * (a + b)) + phi(b));
                }
            }
            acc[(i - 1) * nx + (j - 1)] -= dissipation * integral;
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn add_source_step(
    acc: &mut [f64],
    grid: &HatGrid,
    e: &dyn EntropyPair,
    t: f64,
    s: f64,
    minus: &PcFn,
    plus: &PcFn,
    g: &PcFn,
) {
    let nx = grid.x.len() - 2;
    let weights: Vec<(usize, f64)> = (1..=grid.t.len() - 2)
        .map(|i| (i, hat(&grid.t, i, t)))
        .filter(|&(_, w)| w > 0.0)
        .collect();
    if weights.is_empty() {
        return;
    }
    let (xa, xb) = (grid.x[0], grid.x[grid.x.len() - 1]);
    let mut pts: Vec<f64> = minus
        .breaks()
        .iter()
        .chain(plus.breaks())
        .chain(g.breaks())
        .copied()
        .collect();
    pts.retain(|&x| x > xa && x < xb);
    pts.push(xa);
    pts.push(xb);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    for w in pts.windows(2) {
        let (p, q) = (w[0], w[1]);
        let mid = 0.5 * (p + q);
        let (um, up, gv) = (minus.eval(mid), plus.eval(mid), g.eval(mid));
        let d = (e.gradient(&um) + e.gradient(&up)) * 0.5;
        let c = e.eta(&up) - e.eta(&um) - s * d.dot(&gv);
        if c == 0.0 {
            continue;
        }
        for j in hats_meeting(&grid.x, p, q) {
            let hx = hat_integral(&grid.x, j, p, q);
            for &(i, wt) in &weights {
                acc[(i - 1) * nx + (j - 1)] += c * wt * hx;
            }
        }
    }
}

#[cfg(test)]
pub(super) fn hat_integral_for_tests(nodes: &[f64], i: usize, p: f64, q: f64) -> f64 {
    hat_integral(nodes, i, p, q)
}

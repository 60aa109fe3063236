//! Checks of the solution characterization: local comparison with the
//! self-similar and the linearized solution, entropy residuals, and exact
//! rescaling of the homogeneous problem.

mod entropy;
#[cfg(test)]
mod tests;

pub use entropy::{
    entropy_residual, validate_entropy, EntropyPair, EntropyReport, EulerEntropy, HatGrid, Kruzkov,
};

use alloc::vec::Vec;

use crate::fronttrack::{track, TrackOpts};
use crate::math::gauss_legendre;
use crate::models::Model;
use crate::pcfn::{Field, PcFn};
use crate::source::apply_g;
use crate::splitting::{evolve, SplitSchedule};
use crate::system::{RiemannFan, SystemModel, WaveKind};
use crate::{Error, Result, State};

/// A function of `(θ, x)` that can be compared with a piecewise-constant profile.
pub trait LocalSolution {
    fn eval(&self, theta: f64, x: f64) -> State;
    /// Points where `eval(θ, ·)` is not smooth.
    fn breakpoints(&self, theta: f64) -> Vec<f64>;
}

/// Self-similar solution of the Riemann problem at `ξ` with data `v(ξ±)`.
#[derive(Debug, Clone)]
pub struct SharpFan<'a> {
    model: &'a SystemModel,
    xi: f64,
    left: State,
    right: State,
    fan: RiemannFan,
}

impl<'a> SharpFan<'a> {
    pub fn new(model: &'a SystemModel, v: &PcFn, xi: f64) -> Result<Self> {
        let left = v.left_limit(xi);
        let right = v.right_limit(xi);
        let fan = model.riemann_fan(&left, &right, None)?;
        Ok(SharpFan {
            model,
            xi,
            left,
            right,
            fan,
        })
    }

    pub fn fan(&self) -> &RiemannFan {
        &self.fan
    }
}

impl LocalSolution for SharpFan<'_> {
    fn eval(&self, theta: f64, x: f64) -> State {
        if theta <= 0.0 {
            return if x < self.xi { self.left } else { self.right };
        }
        let zeta = (x - self.xi) / theta;
        let mut state = self.left;
        for w in &self.fan.waves {
            if zeta < w.speed {
                return state;
            }
            if w.kind == WaveKind::Rarefaction && zeta < w.speed_right {
                let k = self.model.k()[w.family];
                let sigma = (zeta - w.speed) / k;
                return self
                    .model
                    .rarefaction_curve(w.family, sigma, &w.left)
                    .unwrap_or(w.left);
            }
            state = w.right;
        }
        self.right
    }

    fn breakpoints(&self, theta: f64) -> Vec<f64> {
        let mut out = Vec::new();
        for w in &self.fan.waves {
            out.push(self.xi + theta * w.speed);
            out.push(self.xi + theta * w.speed_right);
        }
        out
    }
}

/// Solution of the problem linearized at `v(ξ)`: the characteristic fields of
/// `v` move with the frozen speeds, and the source `g` is integrated along the
/// frozen characteristics.
#[derive(Debug, Clone)]
pub struct FlatSolution {
    v: PcFn,
    g: Field,
    lambda: Vec<f64>,
    l: Vec<State>,
    r: Vec<State>,
    kinks: Vec<f64>,
}

impl FlatSolution {
    /// `g` is the source evaluated on `v`; pass the zero field to drop it.
    pub fn new(model: &SystemModel, v: &PcFn, g: Field, xi: f64) -> Result<Self> {
        let e = model.eig_unchecked(&v.eval(xi))?;
        let n = model.dim();
        if g.dim() != n || v.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: g.dim().min(v.dim()),
            });
        }
        Ok(FlatSolution {
            v: v.clone(),
            kinks: g.local().breaks().to_vec(),
            g,
            lambda: (0..n).map(|i| e.lambda[i]).collect(),
            l: e.l[..n].to_vec(),
            r: e.r[..n].to_vec(),
        })
    }

    fn transported(&self, i: usize, theta: f64, x: f64) -> f64 {
        let lam = self.lambda[i];
        let mut acc = self.l[i].dot(&self.v.eval(x - lam * theta));
        if theta > 0.0 {
            let integral = if lam == 0.0 {
                self.g.eval(x) * theta
            } else {
                signed_integral(&self.g, x - lam * theta, x) * (1.0 / lam)
            };
            acc += self.l[i].dot(&integral);
        }
        acc
    }
}

fn signed_integral(g: &Field, a: f64, b: f64) -> State {
    if a <= b {
        g.integral_on(a, b)
    } else {
        -g.integral_on(b, a)
    }
}

impl LocalSolution for FlatSolution {
    fn eval(&self, theta: f64, x: f64) -> State {
        let mut out = State::zeros(self.r.len());
        for i in 0..self.r.len() {
            out += self.r[i] * self.transported(i, theta, x);
        }
        out
    }

    fn breakpoints(&self, theta: f64) -> Vec<f64> {
        let mut out = Vec::new();
        for &lam in &self.lambda {
            out.extend(self.v.breaks().iter().map(|y| y + lam * theta));
            out.extend(self.kinks.iter().map(|y| y + lam * theta));
        }
        out.extend_from_slice(&self.kinks);
        out
    }
}

/// `∫_a^b ‖w(x) − sol(θ, x)‖ dx`: exact between breakpoints of both sides when
/// `sol` is piecewise polynomial of low degree, Gauss-Legendre otherwise.
pub fn window_integral(w: &PcFn, sol: &dyn LocalSolution, theta: f64, a: f64, b: f64) -> f64 {
    if !(b > a) {
        return 0.0;
    }
    let mut pts: Vec<f64> = w
        .breaks()
        .iter()
        .copied()
        .filter(|&x| x > a && x < b)
        .collect();
    pts.extend(
        sol.breakpoints(theta)
            .into_iter()
            .filter(|&x| x > a && x < b),
    );
    pts.push(a);
    pts.push(b);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut total = 0.0;
    for win in pts.windows(2) {
        let (lo, hi) = (win[0], win[1]);
        if hi <= lo {
            continue;
        }
        let wv = w.eval(0.5 * (lo + hi));
        total += gauss_legendre(|x| (wv - sol.eval(theta, x)).norm(), lo, hi, 2);
    }
    total
}

/// Comparison window around `ξ`: the sharp check uses `[ξ − θλ̂, ξ + θλ̂]`,
/// the flat check `[a + θλ̂, b − θλ̂]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalWindow {
    pub xi: f64,
    pub a: f64,
    pub b: f64,
    pub thetas: Vec<f64>,
}

/// Evolution settings for `F_θ`: `s = θ/2^refine`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalEvolution {
    pub n: usize,
    pub eps: f64,
    pub refine: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacterizationRow {
    pub theta: f64,
    /// `(1/θ)∫ ‖F_θ v − U♯‖` over the light cone of `ξ`.
    pub sharp: f64,
    /// `(1/θ)∫ ‖F_θ v − U♭‖` over the shrunken window.
    pub flat: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CharacterizationReport {
    pub rows: Vec<CharacterizationRow>,
    /// `TV(v; ]a, b[)`.
    pub tv: f64,
    /// Flat quotient at the smallest `θ` divided by `TV²`.
    pub flat_ratio: f64,
}

/// Local comparisons of `F_θ v` with `U♯` and `U♭` at `ξ`.
pub fn check_characterization(
    model: &Model,
    v: &PcFn,
    window: &LocalWindow,
    evo: LocalEvolution,
) -> Result<CharacterizationReport> {
    let sys = &model.system;
    if !(window.a < window.xi && window.xi < window.b) || window.thetas.is_empty() {
        return Err(Error::InvalidParameter(alloc::format!(
            "window ]{}, {}[ must contain xi = {} and list thetas",
            window.a,
            window.b,
            window.xi
        )));
    }
    let lam = sys.lambda_hat();
    let sharp = SharpFan::new(sys, v, window.xi)?;
    let g = Field::from_local(apply_g(model.source.as_ref(), v, evo.n)?);
    let flat = FlatSolution::new(sys, v, g, window.xi)?;
    let mut rows = Vec::with_capacity(window.thetas.len());
    for &theta in &window.thetas {
        if !(theta > 0.0) || 2.0 * theta * lam >= window.b - window.a {
            return Err(Error::InvalidParameter(alloc::format!(
                "theta {theta} does not fit the window"
            )));
        }
        let s = theta / f64::from(1u32 << evo.refine);
        let w = evolve(model, v, &SplitSchedule::new(s, theta, evo.n, evo.eps))?;
        let q_sharp = window_integral(
            &w,
            &sharp,
            theta,
            window.xi - theta * lam,
            window.xi + theta * lam,
        ) / theta;
        let q_flat = window_integral(
            &w,
            &flat,
            theta,
            window.a + theta * lam,
            window.b - theta * lam,
        ) / theta;
        rows.push(CharacterizationRow {
            theta,
            sharp: q_sharp,
            flat: q_flat,
        });
    }
    let tv = v.tv_on(window.a, window.b);
    let smallest = rows
        .iter()
        .min_by(|x, y| x.theta.total_cmp(&y.theta))
        .expect("nonempty");
    let flat_ratio = if tv > 0.0 {
        smallest.flat / (tv * tv)
    } else {
        f64::INFINITY
    };
    Ok(CharacterizationReport {
        rows,
        tv,
        flat_ratio,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RescalingRow {
    pub lambda: f64,
    /// `‖S_t u − (S_{t/λ} u_λ)_{1/λ}‖`, measured in the undilated frame.
    pub deviation: f64,
}

/// Deviation from `(S_t u)_λ = S_{t/λ} u_λ` for the homogeneous tracking
/// semigroup, with `u_λ(x) = u(λx)`.
pub fn rescaling_check(
    model: &SystemModel,
    u: &PcFn,
    t: f64,
    lambdas: &[f64],
    eps: f64,
) -> Result<Vec<RescalingRow>> {
    let opts = TrackOpts::new(eps);
    let reference = track(model, u, t, opts)?;
    lambdas
        .iter()
        .map(|&lambda| {
            if !(lambda > 0.0) {
                return Err(Error::InvalidParameter(alloc::format!(
                    "dilation {lambda} must be positive"
                )));
            }
            let scaled = track(model, &u.dilate(lambda)?, t / lambda, opts)?;
            let deviation = reference.l1_dist(&scaled.dilate(1.0 / lambda)?)?;
            Ok(RescalingRow { lambda, deviation })
        })
        .collect()
}

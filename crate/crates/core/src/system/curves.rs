use alloc::vec::Vec;

use super::{Branch, FieldKind, SystemModel};
use crate::error::{Error, Result};
use crate::math::ceil;
use crate::state::{Mat, State, MAX_DIM};

/// Type of an elementary wave.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveKind {
    Shock,
    Rarefaction,
    Contact,
}

/// One elementary wave of a Riemann solution.
#[derive(Debug, Clone, Copy)]
pub struct FanWave {
    pub family: usize,
    pub sigma: f64,
    pub kind: WaveKind,
    pub left: State,
    pub right: State,
    /// Shock or contact speed; for rarefactions the speed of the left edge.
    pub speed: f64,
    /// Right edge speed (equals `speed` except for rarefactions).
    pub speed_right: f64,
}

/// Solution of a Riemann problem in strength coordinates.
#[derive(Debug, Clone)]
pub struct RiemannFan {
    pub strengths: State,
    /// Waves with nonzero strength, ordered by family.
    pub waves: Vec<FanWave>,
}

/// Below this strength shocks are computed from the integral curve, where the
/// Hugoniot difference quotients would lose all precision.
const SMALL_SHOCK: f64 = 1e-6;

/// Largest rarefaction RK4 step, in units of `λ_j` (or arc length).
const RK_STEP: f64 = 0.01;

impl SystemModel {
    /// Integral curve of `r_j` through `u`: `λ_j` grows at rate `k_j` for
    /// genuinely nonlinear fields, arc length otherwise. Any sign of `σ`.
    pub fn rarefaction_curve(&self, j: usize, sigma: f64, u: &State) -> Result<State> {
        if sigma == 0.0 {
            return Ok(*u);
        }
        if let Some(v) =
            self.system()
                .curve_closed_form(j, sigma, self.k()[j], u, Branch::Rarefaction)
        {
            return Ok(v);
        }
        let steps = ceil(sigma.abs() / RK_STEP).max(1.0) as usize;
        let h = sigma / steps as f64;
        let mut v = *u;
        let rhs = |w: &State| -> Result<State> {
            if !self.system().admissible(w) {
                return Err(Error::OutsideDomain);
            }
            self.curve_tangent(w, j)
        };
        for _ in 0..steps {
            let k1 = rhs(&v)?;
            let k2 = rhs(&(v + k1 * (0.5 * h)))?;
            let k3 = rhs(&(v + k2 * (0.5 * h)))?;
            let k4 = rhs(&(v + k3 * h))?;
            v += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        }
        Ok(v)
    }

    /// Point of the Hugoniot locus with `λ_j(u⁺) = λ_j(u) + k_j·σ`, and the
    /// shock speed. Linearly degenerate fields return the contact curve.
    pub fn shock_curve(&self, j: usize, sigma: f64, u: &State) -> Result<(State, f64)> {
        let e = self.eig_unchecked(u)?;
        if sigma == 0.0 {
            return Ok((*u, e.lambda[j]));
        }
        if self.field_kind(j) == FieldKind::LinearlyDegenerate {
            let v = self.rarefaction_curve(j, sigma, u)?;
            return Ok((v, e.lambda[j]));
        }
        if self.dim() == 1 {
            let v = match self
                .system()
                .curve_closed_form(j, sigma, self.k()[j], u, Branch::Shock)
            {
                Some(v) => v,
                None => self.rarefaction_curve(j, sigma, u)?,
            };
            return Ok((v, self.rh_speed(u, &v)?));
        }
        if sigma.abs() <= SMALL_SHOCK {
            // the Hugoniot locus and the integral curve agree to third order
            let v = self.rarefaction_curve(j, sigma, u)?;
            return Ok((v, 0.5 * (e.lambda[j] + self.eig_unchecked(&v)?.lambda[j])));
        }
        self.hugoniot(j, sigma, u, &e)
    }

    /// Scalar Rankine-Hugoniot speed.
    pub fn rh_speed(&self, l: &State, r: &State) -> Result<f64> {
        let du = r[0] - l[0];
        if du == 0.0 {
            return self.lambda(l, 0);
        }
        Ok((self.flux(r)[0] - self.flux(l)[0]) / du)
    }

    fn hugoniot(&self, j: usize, sigma: f64, u: &State, e: &super::Eigen) -> Result<(State, f64)> {
        let n = self.dim();
        let l = e.l[j];
        let lam0 = e.lambda[j];
        let target = lam0 + self.k()[j] * sigma;
        let g = self.lambda_gradient(u, j)?.dot(&e.r[j]);
        let fu = self.flux(u);
        let mut w = e.r[j];
        let mut s = lam0 + 0.5 * self.k()[j] * sigma;

        let inner = |zeta: f64, w: &mut State, s: &mut f64| -> Result<()> {
            for _ in 0..40 {
                let v = *u + *w * zeta;
                if !self.system().admissible(&v) {
                    return Err(Error::OutsideDomain);
                }
                let f1 = (self.flux(&v) - fu) * (1.0 / zeta) - *w * *s;
                let df = self.system().jacobian(&v);
                let mut jm = Mat::zeros(n + 1);
                let mut rhs = State::zeros(n + 1);
                for a in 0..n {
                    for b in 0..n {
                        jm.set(a, b, df.get(a, b) - if a == b { *s } else { 0.0 });
                    }
                    jm.set(a, n, -w[a]);
                    jm.set(n, a, l[a]);
                    rhs[a] = -f1[a];
                }
                rhs[n] = -(l.dot(w) - 1.0);
                let d = jm
                    .solve(&rhs)
                    .ok_or(Error::NewtonFailed { residual: f64::NAN })?;
                for a in 0..n {
                    w[a] += d[a];
                }
                *s += d[n];
                if d.norm() <= 1e-15 * (1.0 + w.norm() + s.abs()) {
                    return Ok(());
                }
            }
            Ok(())
        };

        let (mut za, mut ha) = (0.0, -self.k()[j] * sigma);
        let mut zb = self.k()[j] * sigma / g;
        inner(zb, &mut w, &mut s)?;
        let mut hb = self.lambda(&(*u + w * zb), j)? - target;
        let tol = 1e-14 * (1.0 + target.abs());
        for _ in 0..60 {
            if hb.abs() <= tol || hb == ha {
                break;
            }
            let zc = zb - hb * (zb - za) / (hb - ha);
            za = zb;
            ha = hb;
            zb = zc;
            inner(zb, &mut w, &mut s)?;
            hb = self.lambda(&(*u + w * zb), j)? - target;
        }
        if !(hb.abs() <= 1e-10 * (1.0 + target.abs())) {
            return Err(Error::NewtonFailed { residual: hb.abs() });
        }
        Ok((*u + w * zb, s))
    }

    /// One elementary wave from `u`: `(state, speed, kind)`. With `glue`,
    /// genuinely nonlinear fields use the shock branch for both signs.
    pub(crate) fn elementary(
        &self,
        j: usize,
        sigma: f64,
        u: &State,
        glue: bool,
    ) -> Result<(State, f64, WaveKind)> {
        match self.field_kind(j) {
            FieldKind::LinearlyDegenerate => {
                let v = self.rarefaction_curve(j, sigma, u)?;
                Ok((v, self.lambda(u, j)?, WaveKind::Contact))
            }
            FieldKind::GenuinelyNonlinear if sigma < 0.0 || glue => {
                let (v, s) = self.shock_curve(j, sigma, u)?;
                Ok((v, s, WaveKind::Shock))
            }
            FieldKind::GenuinelyNonlinear => {
                let v = self.rarefaction_curve(j, sigma, u)?;
                Ok((v, self.lambda(u, j)?, WaveKind::Rarefaction))
            }
        }
    }

    /// The Lax curve `ψ_j(σ)(u)`; errors if the end state leaves `Ω`.
    pub fn lax_curve(&self, j: usize, sigma: f64, u: &State) -> Result<State> {
        let v = self.elementary(j, sigma, u, false)?.0;
        if !self.in_omega(&v) {
            return Err(Error::OutsideDomain);
        }
        Ok(v)
    }

    fn compose(&self, sigma: &State, u: &State, glue: bool) -> Result<State> {
        if sigma.len() != self.dim() || u.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: sigma.len(),
            });
        }
        let mut v = *u;
        for j in 0..self.dim() {
            if sigma[j] != 0.0 {
                v = self.elementary(j, sigma[j], &v, glue)?.0;
            }
        }
        Ok(v)
    }

    /// `Ψ(σ)(u) = ψ_n(σ_n)∘…∘ψ_1(σ_1)(u)`.
    pub fn psi(&self, sigma: &State, u: &State) -> Result<State> {
        self.compose(sigma, u, false)
    }

    /// `𝐒(σ)(u)`: composition of Hugoniot branches for every sign.
    pub fn rh_glue(&self, sigma: &State, u: &State) -> Result<State> {
        self.compose(sigma, u, true)
    }

    /// Linearized strengths `σ ≈ E(u⁻, u⁺)`.
    pub fn linear_strengths(&self, ul: &State, ur: &State) -> Result<State> {
        let mid = (*ul + *ur) * 0.5;
        let b = self.tangent_matrix(&mid)?;
        b.solve(&(*ur - *ul)).ok_or(Error::NotHyperbolic)
    }

    fn tangent_matrix(&self, u: &State) -> Result<Mat> {
        let n = self.dim();
        let e = self.eig_unchecked(u)?;
        let mut cols = [State::zeros(n); MAX_DIM];
        for (j, c) in cols.iter_mut().enumerate().take(n) {
            *c = self.tangent_from(&e, u, j)?;
        }
        Ok(Mat::from_cols(&cols[..n]))
    }

    /// The strength map `E`: solves `Ψ(σ)(u⁻) = u⁺` by damped quasi-Newton
    /// iteration (Broyden updates, finite-difference restarts).
    pub fn riemann_strengths(
        &self,
        ul: &State,
        ur: &State,
        guess: Option<&State>,
    ) -> Result<State> {
        let n = self.dim();
        if ul.len() != n || ur.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: ul.len(),
            });
        }
        if ul == ur {
            return Ok(State::zeros(n));
        }
        let opts = self.newton;
        let resid = |s: &State| -> Option<State> {
            self.psi(s, ul)
                .ok()
                .map(|v| v - *ur)
                .filter(|r| r.is_finite())
        };
        let mut sigma = match guess {
            Some(g) => *g,
            None => self.linear_strengths(ul, ur)?,
        };
        let mut f = match resid(&sigma) {
            Some(f) => f,
            None => {
                sigma = self.linear_strengths(ul, ur)?;
                resid(&sigma).ok_or(Error::NewtonFailed {
                    residual: f64::INFINITY,
                })?
            }
        };
        let mut b = self.tangent_matrix(&((*ul + *ur) * 0.5))?;
        let stop = 1e-14 * (1.0 + ur.norm());
        let mut restarts = 0;
        let mut iter = 0;
        while iter < opts.max_iter {
            let fnorm = f.norm();
            if fnorm <= stop {
                break;
            }
            iter += 1;
            let d = match b.solve(&(-f)) {
                Some(d) => d,
                None => return Err(Error::NewtonFailed { residual: fnorm }),
            };
            let mut t = 1.0;
            let mut accepted = None;
            for _ in 0..12 {
                let cand = sigma + d * t;
                if let Some(fc) = resid(&cand) {
                    if fc.norm() < fnorm {
                        accepted = Some((cand, fc));
                        break;
                    }
                }
                t *= opts.damping;
            }
            match accepted {
                Some((cand, fc)) => {
                    let s = cand - sigma;
                    let y = fc - f;
                    let bs = b.mul_vec(&s);
                    let ss = s.dot(&s);
                    if ss > 0.0 {
                        for a in 0..n {
                            for c in 0..n {
                                b.set(a, c, b.get(a, c) + (y[a] - bs[a]) * s[c] / ss);
                            }
                        }
                    }
                    sigma = cand;
                    f = fc;
                }
                None => {
                    if fnorm <= opts.tol || restarts >= 3 {
                        break;
                    }
                    restarts += 1;
                    b = self.fd_jacobian(&sigma, ul, &f, ur)?;
                }
            }
        }
        let r = f.norm();
        if !(r <= opts.tol) {
            return Err(Error::NewtonFailed { residual: r });
        }
        Ok(sigma)
    }

    fn fd_jacobian(&self, sigma: &State, ul: &State, f0: &State, ur: &State) -> Result<Mat> {
        let n = self.dim();
        let mut cols = [State::zeros(n); MAX_DIM];
        for (j, c) in cols.iter_mut().enumerate().take(n) {
            let h = 1e-7 * (1.0 + sigma[j].abs());
            let mut s = *sigma;
            s[j] += h;
            let fj = self.psi(&s, ul)? - *ur;
            *c = (fj - *f0) * (1.0 / h);
        }
        Ok(Mat::from_cols(&cols[..n]))
    }

    /// Full Riemann solution: strengths plus the elementary waves, with the
    /// final right state set exactly to `u⁺`.
    pub fn riemann_fan(&self, ul: &State, ur: &State, guess: Option<&State>) -> Result<RiemannFan> {
        let strengths = self.riemann_strengths(ul, ur, guess)?;
        let mut waves = Vec::new();
        let mut v = *ul;
        for j in 0..self.dim() {
            let sj = strengths[j];
            if sj == 0.0 {
                continue;
            }
            let (w, speed, kind) = self.elementary(j, sj, &v, false)?;
            let speed_right = if kind == WaveKind::Rarefaction {
                self.lambda(&w, j)?
            } else {
                speed
            };
            waves.push(FanWave {
                family: j,
                sigma: sj,
                kind,
                left: v,
                right: w,
                speed,
                speed_right,
            });
            v = w;
        }
        if let Some(last) = waves.last_mut() {
            last.right = *ur;
            if self.dim() == 1 && last.kind == WaveKind::Shock {
                last.speed = self.rh_speed(ul, ur)?;
                last.speed_right = last.speed;
            }
        }
        Ok(RiemannFan { strengths, waves })
    }
}

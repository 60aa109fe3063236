//! Hyperbolic system models: eigenstructure, wave curves, the strength map
//! `E`, and the Glimm functionals.

mod curves;
mod eigen;
mod glimm;

pub use curves::{FanWave, RiemannFan, WaveKind};
pub use eigen::eigen_from_jacobian;
pub use glimm::{Glimm, StrengthProfile, C0_SAMPLES};

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::state::{Mat, State, MAX_DIM};

/// Genuinely nonlinear or linearly degenerate characteristic field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    GenuinelyNonlinear,
    LinearlyDegenerate,
}

/// Sorted eigenvalues with right and left eigenvectors.
#[derive(Debug, Clone, Copy)]
pub struct Eigen {
    pub lambda: State,
    pub r: [State; MAX_DIM],
    pub l: [State; MAX_DIM],
}

impl Eigen {
    pub fn dim(&self) -> usize {
        self.lambda.len()
    }
}

/// Which branch of the `j`-th wave curve is requested.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Rarefaction,
    Shock,
}

/// Flux and eigenstructure of `u_t + f(u)_x = 0`, in deviation variables.
pub trait HyperbolicSystem: Send + Sync {
    fn name(&self) -> &str;
    fn dim(&self) -> usize;
    fn flux(&self, u: &State) -> State;

    /// Jacobian `Df(u)`; forward differences by default.
    fn jacobian(&self, u: &State) -> Mat {
        let n = self.dim();
        let f0 = self.flux(u);
        let mut cols = [State::zeros(n); MAX_DIM];
        for (j, col) in cols.iter_mut().enumerate().take(n) {
            let h = 1e-7 * (1.0 + u[j].abs());
            let mut v = *u;
            v[j] += h;
            *col = (self.flux(&v) - f0) * (1.0 / h);
        }
        Mat::from_cols(&cols[..n])
    }

    /// Sorted eigenvalues and eigenvectors of `Df(u)` with arbitrary scaling.
    fn eigen(&self, u: &State) -> Result<Eigen> {
        eigen_from_jacobian(&self.jacobian(u))
    }

    fn field_kind(&self, j: usize) -> FieldKind;

    /// Gradient of `λ_j`; `None` selects central differences.
    fn lambda_gradient(&self, _u: &State, _j: usize) -> Option<State> {
        None
    }

    /// Closed-form wave curve, when the model has one.
    fn curve_closed_form(
        &self,
        _j: usize,
        _sigma: f64,
        _k: f64,
        _u: &State,
        _branch: Branch,
    ) -> Option<State> {
        None
    }

    /// Physical admissibility (e.g. positive density and pressure).
    fn admissible(&self, _u: &State) -> bool {
        true
    }
}

/// Newton settings for the strength map `E`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOpts {
    pub damping: f64,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for NewtonOpts {
    fn default() -> Self {
        NewtonOpts {
            damping: 0.5,
            max_iter: 50,
            tol: 1e-10,
        }
    }
}

/// An immutable, shareable hyperbolic model with normalized eigenvectors,
/// curve constants `k_j`, speed bound `λ̂` and admissible box `Ω`.
#[derive(Clone)]
pub struct SystemModel {
    sys: Arc<dyn HyperbolicSystem>,
    k: Vec<f64>,
    lambda_hat: f64,
    omega: State,
    r0: [State; MAX_DIM],
    pub newton: NewtonOpts,
    /// Constant `C₀` weighting the interaction potential in `Υ`.
    pub c0: f64,
}

impl core::fmt::Debug for SystemModel {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("SystemModel")
            .field("name", &self.sys.name())
            .field("k", &self.k)
            .field("lambda_hat", &self.lambda_hat)
            .field("omega", &self.omega)
            .field("c0", &self.c0)
            .finish()
    }
}

/// Deterministic sample points of the box `[−w, w]` (corners, center, Halton points).
pub fn box_samples(omega: &State, count: usize) -> Vec<State> {
    const PRIMES: [u32; 5] = [2, 3, 5, 7, 11];
    let n = omega.len();
    let mut out = Vec::new();
    out.push(State::zeros(n));
    for mask in 0..(1usize << n) {
        let mut s = State::zeros(n);
        for i in 0..n {
            s[i] = if mask >> i & 1 == 1 {
                omega[i]
            } else {
                -omega[i]
            };
        }
        out.push(s);
    }
    for k in 1..=count {
        let mut s = State::zeros(n);
        for i in 0..n {
            s[i] = (2.0 * halton(k as u32, PRIMES[i]) - 1.0) * omega[i];
        }
        out.push(s);
    }
    out
}

/// Radical inverse of `k` in base `b`.
pub fn halton(mut k: u32, b: u32) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while k > 0 {
        f /= b as f64;
        r += f * (k % b) as f64;
        k /= b;
    }
    r
}

impl SystemModel {
    /// Build a model, certifying strict hyperbolicity on samples of `Ω`.
    /// `lambda_hat` defaults to 1.1 times the sampled maximal speed.
    pub fn new(
        sys: Arc<dyn HyperbolicSystem>,
        omega: State,
        lambda_hat: Option<f64>,
    ) -> Result<Self> {
        let n = sys.dim();
        if omega.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: omega.len(),
            });
        }
        if omega.as_slice().iter().any(|w| !(*w > 0.0)) {
            return Err(Error::InvalidParameter(String::from(
                "box half-widths must be positive",
            )));
        }
        let zero = State::zeros(n);
        if !sys.admissible(&zero) {
            return Err(Error::OutsideDomain);
        }
        let e0 = sys.eigen(&zero)?;
        let mut r0 = [State::zeros(n); MAX_DIM];
        for j in 0..n {
            let mut r = e0.r[j] * (1.0 / e0.r[j].norm());
            // orient so the largest component is positive
            let big = (0..n).fold(0, |b, i| if r[i].abs() > r[b].abs() { i } else { b });
            if r[big] < 0.0 {
                r = -r;
            }
            r0[j] = r;
        }
        let mut model = SystemModel {
            sys,
            k: alloc::vec![1.0; n],
            lambda_hat: 1.0,
            omega,
            r0,
            newton: NewtonOpts::default(),
            c0: 1.0,
        };
        let mut max_speed: f64 = 0.0;
        for u in box_samples(&omega, 64 * n) {
            if !model.sys.admissible(&u) {
                return Err(Error::OutsideDomain);
            }
            let e = model.eig_unchecked(&u)?;
            for j in 0..n {
                if j + 1 < n && !(e.lambda[j] < e.lambda[j + 1]) {
                    return Err(Error::NotHyperbolic);
                }
                max_speed = max_speed.max(e.lambda[j].abs());
            }
        }
        model.lambda_hat = match lambda_hat {
            Some(l) if l > max_speed => l,
            Some(l) => {
                return Err(Error::InvalidParameter(alloc::format!(
                    "speed bound {l} does not exceed the sampled maximal speed {max_speed}"
                )))
            }
            None => 1.1 * max_speed.max(1e-3),
        };
        Ok(model)
    }

    /// Override the curve constants `k_j > 0`.
    pub fn with_k(mut self, k: Vec<f64>) -> Result<Self> {
        if k.len() != self.dim() || k.iter().any(|x| !(*x > 0.0)) {
            return Err(Error::InvalidParameter(String::from(
                "k_j must be positive, one per field",
            )));
        }
        self.k = k;
        Ok(self)
    }

    pub fn with_c0(mut self, c0: f64) -> Self {
        self.c0 = c0;
        self
    }

    pub fn system(&self) -> &Arc<dyn HyperbolicSystem> {
        &self.sys
    }
    pub fn name(&self) -> &str {
        self.sys.name()
    }
    pub fn dim(&self) -> usize {
        self.sys.dim()
    }
    pub fn k(&self) -> &[f64] {
        &self.k
    }
    pub fn lambda_hat(&self) -> f64 {
        self.lambda_hat
    }
    pub fn omega(&self) -> &State {
        &self.omega
    }
    pub fn field_kind(&self, j: usize) -> FieldKind {
        self.sys.field_kind(j)
    }
    pub fn flux(&self, u: &State) -> State {
        self.sys.flux(u)
    }

    pub fn in_omega(&self, u: &State) -> bool {
        u.len() == self.dim()
            && (0..u.len()).all(|i| u[i].abs() <= self.omega[i])
            && self.sys.admissible(u)
    }

    /// Normalized eigenstructure: `‖r_j‖ = 1`, sign continuous from the
    /// origin, `l_i·r_j = δ_ij`. Errors outside `Ω`.
    pub fn eig(&self, u: &State) -> Result<Eigen> {
        if !self.in_omega(u) {
            return Err(Error::OutsideDomain);
        }
        self.eig_unchecked(u)
    }

    pub(crate) fn eig_unchecked(&self, u: &State) -> Result<Eigen> {
        let mut e = self.sys.eigen(u)?;
        let n = self.dim();
        for j in 0..n {
            let nr = e.r[j].norm();
            if !(nr > 0.0) || !nr.is_finite() {
                return Err(Error::NotHyperbolic);
            }
            let mut r = e.r[j] * (1.0 / nr);
            if r.dot(&self.r0[j]) < 0.0 {
                r = -r;
            }
            e.r[j] = r;
            let lr = e.l[j].dot(&r);
            if lr == 0.0 || !lr.is_finite() {
                return Err(Error::NotHyperbolic);
            }
            e.l[j] = e.l[j] * (1.0 / lr);
        }
        Ok(e)
    }

    pub fn lambda(&self, u: &State, j: usize) -> Result<f64> {
        Ok(self.eig_unchecked(u)?.lambda[j])
    }

    /// `∇λ_j(u)`, analytic when the system supplies it.
    pub fn lambda_gradient(&self, u: &State, j: usize) -> Result<State> {
        if let Some(g) = self.sys.lambda_gradient(u, j) {
            return Ok(g);
        }
        let n = self.dim();
        let mut g = State::zeros(n);
        for i in 0..n {
            let h = 1e-6 * (1.0 + u[i].abs());
            let mut up = *u;
            let mut dn = *u;
            up[i] += h;
            dn[i] -= h;
            g[i] = (self.lambda(&up, j)? - self.lambda(&dn, j)?) / (2.0 * h);
        }
        Ok(g)
    }

    /// Tangent `dψ_j/dσ` at `σ = 0`.
    pub fn curve_tangent(&self, u: &State, j: usize) -> Result<State> {
        let e = self.eig_unchecked(u)?;
        self.tangent_from(&e, u, j)
    }

    fn tangent_from(&self, e: &Eigen, u: &State, j: usize) -> Result<State> {
        match self.field_kind(j) {
            FieldKind::LinearlyDegenerate => Ok(e.r[j]),
            FieldKind::GenuinelyNonlinear => {
                let d = self.lambda_gradient(u, j)?.dot(&e.r[j]);
                if d.abs() < 1e-12 {
                    return Err(Error::NotHyperbolic);
                }
                Ok(e.r[j] * (self.k[j] / d))
            }
        }
    }

    /// Largest characteristic speed magnitude at `u`.
    pub fn max_speed(&self, u: &State) -> Result<f64> {
        let e = self.eig_unchecked(u)?;
        Ok(e.lambda.as_slice().iter().fold(0.0, |m, l| m.max(l.abs())))
    }

    /// `‖Df₁ − Df₂‖` sampled over `Ω` (max entry).
    pub fn jacobian_distance(&self, other: &SystemModel, samples: usize) -> f64 {
        box_samples(&self.omega, samples)
            .iter()
            .map(|u| self.sys.jacobian(u).sub(&other.sys.jacobian(u)).norm_max())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Burgers;
    impl HyperbolicSystem for Burgers {
        fn name(&self) -> &str {
            "burgers"
        }
        fn dim(&self) -> usize {
            1
        }
        fn flux(&self, u: &State) -> State {
            State::scalar(0.5 * u[0] * u[0])
        }
        fn field_kind(&self, _: usize) -> FieldKind {
            FieldKind::GenuinelyNonlinear
        }
    }

    #[test]
    fn default_eigen_for_scalar_is_derivative() {
        let m = SystemModel::new(Arc::new(Burgers), State::scalar(2.0), None).unwrap();
        let e = m.eig(&State::scalar(0.7)).unwrap();
        assert!((e.lambda[0] - 0.7).abs() < 1e-6);
        assert_eq!(e.r[0][0], 1.0);
        assert!((m.lambda_hat() - 2.2).abs() < 1e-6);
    }

    #[test]
    fn scalar_interactions_do_not_amplify() {
        let m = crate::models::burgers().unwrap().system;
        assert!(m.interaction_constant(C0_SAMPLES).unwrap() < 1e-12);
        assert_eq!(m.c0, 1.0);
    }

    #[test]
    fn euler_interactions_amplify() {
        let eu = crate::models::Euler::new(crate::models::EulerParams::default()).unwrap();
        let m = SystemModel::new(Arc::new(eu), State::from_slice(&[0.05; 3]), None).unwrap();
        let k = m.interaction_constant(C0_SAMPLES).unwrap();
        assert!(k > 1e-3 && k.is_finite(), "K = {k}");
        assert_eq!(m.calibrated_c0().unwrap(), (4.0 * k).max(1.0));
        let g = crate::models::radiating_gas(Default::default())
            .unwrap()
            .system;
        assert_eq!(g.c0, g.calibrated_c0().unwrap());
    }

    #[test]
    fn outside_box_is_rejected() {
        let m = SystemModel::new(Arc::new(Burgers), State::scalar(1.0), None).unwrap();
        assert_eq!(
            m.eig(&State::scalar(1.5)).unwrap_err(),
            Error::OutsideDomain
        );
    }

    #[test]
    fn speed_bound_must_dominate() {
        let r = SystemModel::new(Arc::new(Burgers), State::scalar(1.0), Some(0.5));
        assert!(r.is_err());
    }

    #[test]
    fn halton_base_two() {
        assert_eq!(halton(1, 2), 0.5);
        assert_eq!(halton(3, 2), 0.75);
    }
}

use crate::state::State;
use crate::system::{Branch, Eigen, FieldKind, HyperbolicSystem};

/// Strictly convex scalar flux with an invertible derivative.
pub trait ConvexFlux: Send + Sync {
    fn f(&self, u: f64) -> f64;
    fn df(&self, u: f64) -> f64;
    /// Inverse of `f'`.
    fn df_inv(&self, speed: f64) -> f64;
    /// Legendre transform `L(q) = q·u* − f(u*)`, `f'(u*) = q`.
    fn legendre(&self, q: f64) -> f64 {
        let u = self.df_inv(q);
        q * u - self.f(u)
    }
}

/// Inviscid Burgers flux `u²/2`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Burgers;

impl ConvexFlux for Burgers {
    fn f(&self, u: f64) -> f64 {
        0.5 * u * u
    }
    fn df(&self, u: f64) -> f64 {
        u
    }
    fn df_inv(&self, speed: f64) -> f64 {
        speed
    }
    fn legendre(&self, q: f64) -> f64 {
        0.5 * q * q
    }
}

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
    fn jacobian(&self, u: &State) -> crate::state::Mat {
        crate::state::Mat::from_rows(&[&[u[0]]])
    }
    fn eigen(&self, u: &State) -> crate::error::Result<Eigen> {
        let one = State::scalar(1.0);
        Ok(Eigen {
            lambda: State::scalar(u[0]),
            r: [one; 4],
            l: [one; 4],
        })
    }
    fn field_kind(&self, _: usize) -> FieldKind {
        FieldKind::GenuinelyNonlinear
    }
    fn lambda_gradient(&self, _: &State, _: usize) -> Option<State> {
        Some(State::scalar(1.0))
    }
    fn curve_closed_form(
        &self,
        _: usize,
        sigma: f64,
        k: f64,
        u: &State,
        _: Branch,
    ) -> Option<State> {
        Some(State::scalar(u[0] + k * sigma))
    }
}

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::state::{Mat, State, MAX_DIM};
use crate::system::{Branch, Eigen, FieldKind, HyperbolicSystem};

/// Decoupled linear transport `u_t + diag(c) u_x = 0` with increasing speeds.
#[derive(Debug, Clone)]
pub struct LinearAdvection {
    speeds: Vec<f64>,
}

impl LinearAdvection {
    pub fn new(speeds: Vec<f64>) -> Result<Self> {
        if speeds.is_empty() || speeds.len() > MAX_DIM || speeds.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::NotHyperbolic);
        }
        Ok(LinearAdvection { speeds })
    }

    pub fn speeds(&self) -> &[f64] {
        &self.speeds
    }
}

impl HyperbolicSystem for LinearAdvection {
    fn name(&self) -> &str {
        "linear_advection"
    }
    fn dim(&self) -> usize {
        self.speeds.len()
    }
    fn flux(&self, u: &State) -> State {
        let mut f = *u;
        for (i, c) in self.speeds.iter().enumerate() {
            f[i] *= c;
        }
        f
    }
    fn jacobian(&self, _: &State) -> Mat {
        let mut m = Mat::zeros(self.dim());
        for (i, c) in self.speeds.iter().enumerate() {
            m.set(i, i, *c);
        }
        m
    }
    fn eigen(&self, _: &State) -> Result<Eigen> {
        let n = self.dim();
        let mut r = [State::zeros(n); MAX_DIM];
        for (j, e) in r.iter_mut().enumerate().take(n) {
            *e = State::unit(n, j);
        }
        Ok(Eigen {
            lambda: State::from_slice(&self.speeds),
            r,
            l: r,
        })
    }
    fn field_kind(&self, _: usize) -> FieldKind {
        FieldKind::LinearlyDegenerate
    }
    fn lambda_gradient(&self, _: &State, _: usize) -> Option<State> {
        Some(State::zeros(self.dim()))
    }
    fn curve_closed_form(
        &self,
        j: usize,
        sigma: f64,
        _: f64,
        u: &State,
        _: Branch,
    ) -> Option<State> {
        let mut v = *u;
        v[j] += sigma;
        Some(v)
    }
}

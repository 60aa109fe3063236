use crate::error::Result;
use crate::state::{Mat, State, MAX_DIM};
use crate::system::{Branch, Eigen, FieldKind, HyperbolicSystem};
use alloc::sync::Arc;

/// `f̃(u, w) = (f(u), λ̂·w)`: appends a linearly degenerate clock field
/// travelling faster than every field of the inner system.
#[derive(Clone)]
pub struct Augmented {
    inner: Arc<dyn HyperbolicSystem>,
    speed: f64,
}

impl Augmented {
    pub fn new(inner: Arc<dyn HyperbolicSystem>, speed: f64) -> Self {
        Augmented { inner, speed }
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }
}

impl HyperbolicSystem for Augmented {
    fn name(&self) -> &str {
        "augmented"
    }
    fn dim(&self) -> usize {
        self.inner.dim() + 1
    }
    fn flux(&self, u: &State) -> State {
        let n = self.inner.dim();
        self.inner.flux(&u.truncate(n)).push(self.speed * u[n])
    }
    fn jacobian(&self, u: &State) -> Mat {
        let n = self.inner.dim();
        let a = self.inner.jacobian(&u.truncate(n));
        let mut m = Mat::zeros(n + 1);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, a.get(i, j));
            }
        }
        m.set(n, n, self.speed);
        m
    }
    fn eigen(&self, u: &State) -> Result<Eigen> {
        let n = self.inner.dim();
        let e = self.inner.eigen(&u.truncate(n))?;
        let mut r = [State::zeros(n + 1); MAX_DIM];
        let mut l = [State::zeros(n + 1); MAX_DIM];
        for j in 0..n {
            r[j] = e.r[j].push(0.0);
            l[j] = e.l[j].push(0.0);
        }
        r[n] = State::unit(n + 1, n);
        l[n] = State::unit(n + 1, n);
        Ok(Eigen {
            lambda: e.lambda.push(self.speed),
            r,
            l,
        })
    }
    fn field_kind(&self, j: usize) -> FieldKind {
        if j == self.inner.dim() {
            FieldKind::LinearlyDegenerate
        } else {
            self.inner.field_kind(j)
        }
    }
    fn lambda_gradient(&self, u: &State, j: usize) -> Option<State> {
        let n = self.inner.dim();
        if j == n {
            return Some(State::zeros(n + 1));
        }
        self.inner
            .lambda_gradient(&u.truncate(n), j)
            .map(|g| g.push(0.0))
    }
    fn curve_closed_form(
        &self,
        j: usize,
        sigma: f64,
        k: f64,
        u: &State,
        b: Branch,
    ) -> Option<State> {
        let n = self.inner.dim();
        if j == n {
            let mut v = *u;
            v[n] += sigma;
            return Some(v);
        }
        self.inner
            .curve_closed_form(j, sigma, k, &u.truncate(n), b)
            .map(|v| v.push(u[n]))
    }
    fn admissible(&self, u: &State) -> bool {
        self.inner.admissible(&u.truncate(self.inner.dim()))
    }
}

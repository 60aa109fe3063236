use crate::error::{Error, Result};
use crate::math::sqrt;
use crate::state::{Mat, State, MAX_DIM};
use crate::system::{Eigen, FieldKind, HyperbolicSystem};

/// Gas constants and base state `(ρ̄, 0, ē)` (density, velocity, specific
/// internal energy). Pressure `p = (γ−1)ρe`, temperature `θ = e/c_v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerParams {
    pub gamma: f64,
    pub cv: f64,
    pub rho_bar: f64,
    pub e_bar: f64,
}

impl Default for EulerParams {
    fn default() -> Self {
        EulerParams {
            gamma: 5.0 / 3.0,
            cv: 1.0,
            rho_bar: 1.0,
            e_bar: 1.0,
        }
    }
}

/// Primitive quantities at a state.
#[derive(Debug, Clone, Copy)]
pub struct Primitive {
    pub rho: f64,
    pub v: f64,
    pub e: f64,
    pub p: f64,
    pub c: f64,
    pub h: f64,
}

/// Euler equations in conserved variables `(ρ, m, E)`, written as deviations
/// from the base state so that the base state is the origin.
#[derive(Debug, Clone, Copy)]
pub struct Euler {
    params: EulerParams,
    base: [f64; 3],
    base_flux: [f64; 3],
}

impl Euler {
    pub fn new(params: EulerParams) -> Result<Self> {
        let EulerParams {
            gamma,
            cv,
            rho_bar,
            e_bar,
        } = params;
        if !(gamma > 1.0 && cv > 0.0 && rho_bar > 0.0 && e_bar > 0.0) {
            return Err(Error::InvalidParameter(alloc::format!(
                "gas parameters need γ > 1 and positive c_v, ρ̄, ē: {params:?}"
            )));
        }
        let base = [rho_bar, 0.0, rho_bar * e_bar];
        let mut eu = Euler {
            params,
            base,
            base_flux: [0.0; 3],
        };
        let f = eu.physical_flux(&base);
        eu.base_flux = f;
        Ok(eu)
    }

    pub fn params(&self) -> &EulerParams {
        &self.params
    }

    /// Conserved variables of a deviation state.
    pub fn conserved(&self, u: &State) -> [f64; 3] {
        [
            self.base[0] + u[0],
            self.base[1] + u[1],
            self.base[2] + u[2],
        ]
    }

    /// Deviation state from physical `(ρ, v, e)`.
    pub fn from_primitive(&self, rho: f64, v: f64, e: f64) -> State {
        let cons = [rho, rho * v, rho * e + 0.5 * rho * v * v];
        State::from_slice(&[
            cons[0] - self.base[0],
            cons[1] - self.base[1],
            cons[2] - self.base[2],
        ])
    }

    pub fn primitive(&self, u: &State) -> Primitive {
        let [rho, m, en] = self.conserved(u);
        let g = self.params.gamma;
        let v = m / rho;
        let e = (en - 0.5 * m * v) / rho;
        let p = (g - 1.0) * rho * e;
        let c = sqrt(g * p / rho);
        let h = (en + p) / rho;
        Primitive { rho, v, e, p, c, h }
    }

    /// Temperature `θ = e/c_v`.
    pub fn temperature(&self, u: &State) -> f64 {
        self.primitive(u).e / self.params.cv
    }

    pub fn base_temperature(&self) -> f64 {
        self.params.e_bar / self.params.cv
    }

    pub fn velocity(&self, u: &State) -> f64 {
        let [rho, m, _] = self.conserved(u);
        m / rho
    }

    fn physical_flux(&self, cons: &[f64; 3]) -> [f64; 3] {
        let [rho, m, en] = *cons;
        let v = m / rho;
        let p = (self.params.gamma - 1.0) * (en - 0.5 * m * v);
        [m, m * v + p, (en + p) * v]
    }
}

impl HyperbolicSystem for Euler {
    fn name(&self) -> &str {
        "euler"
    }
    fn dim(&self) -> usize {
        3
    }
    fn flux(&self, u: &State) -> State {
        let f = self.physical_flux(&self.conserved(u));
        State::from_slice(&[
            f[0] - self.base_flux[0],
            f[1] - self.base_flux[1],
            f[2] - self.base_flux[2],
        ])
    }
    fn jacobian(&self, u: &State) -> Mat {
        let Primitive { v, h, .. } = self.primitive(u);
        let g = self.params.gamma;
        Mat::from_rows(&[
            &[0.0, 1.0, 0.0],
            &[0.5 * (g - 3.0) * v * v, (3.0 - g) * v, g - 1.0],
            &[
                v * (0.5 * (g - 1.0) * v * v - h),
                h - (g - 1.0) * v * v,
                g * v,
            ],
        ])
    }
    fn eigen(&self, u: &State) -> Result<Eigen> {
        let Primitive { v, c, h, .. } = self.primitive(u);
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::NotHyperbolic);
        }
        let g = self.params.gamma;
        let b1 = (g - 1.0) / (c * c);
        let b2 = 0.5 * b1 * v * v;
        let z = State::zeros(3);
        let mut r = [z; MAX_DIM];
        let mut l = [z; MAX_DIM];
        r[0] = State::from_slice(&[1.0, v - c, h - v * c]);
        r[1] = State::from_slice(&[1.0, v, 0.5 * v * v]);
        r[2] = State::from_slice(&[1.0, v + c, h + v * c]);
        l[0] = State::from_slice(&[0.5 * (b2 + v / c), 0.5 * (-b1 * v - 1.0 / c), 0.5 * b1]);
        l[1] = State::from_slice(&[1.0 - b2, b1 * v, -b1]);
        l[2] = State::from_slice(&[0.5 * (b2 - v / c), 0.5 * (-b1 * v + 1.0 / c), 0.5 * b1]);
        Ok(Eigen {
            lambda: State::from_slice(&[v - c, v, v + c]),
            r,
            l,
        })
    }
    fn field_kind(&self, j: usize) -> FieldKind {
        if j == 1 {
            FieldKind::LinearlyDegenerate
        } else {
            FieldKind::GenuinelyNonlinear
        }
    }
    fn lambda_gradient(&self, u: &State, j: usize) -> Option<State> {
        let Primitive { rho, v, p, c, .. } = self.primitive(u);
        let g = self.params.gamma;
        let dv = State::from_slice(&[-v / rho, 1.0 / rho, 0.0]);
        if j == 1 {
            return Some(dv);
        }
        let dp = State::from_slice(&[0.5 * v * v, -v, 1.0]) * (g - 1.0);
        let mut dc2 = dp * (g / rho);
        dc2[0] -= g * p / (rho * rho);
        let dc = dc2 * (0.5 / c);
        Some(if j == 0 { dv - dc } else { dv + dc })
    }
    fn admissible(&self, u: &State) -> bool {
        let [rho, m, en] = self.conserved(u);
        rho > 0.0 && en - 0.5 * m * m / rho > 0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sound_speed_at_unit_pressure() {
        // p = (γ−1)ρe = 1 at ρ = 1 needs e = 1/(γ−1)
        let g = 5.0 / 3.0;
        let eu = Euler::new(EulerParams {
            e_bar: 1.0 / (g - 1.0),
            ..Default::default()
        })
        .unwrap();
        let e = eu.eigen(&State::zeros(3)).unwrap();
        let c = (5.0f64 / 3.0).sqrt();
        assert!((e.lambda[0] + c).abs() < 1e-14);
        assert_eq!(e.lambda[1], 0.0);
        assert!((e.lambda[2] - c).abs() < 1e-14);
        assert!((c - 1.290_994_448_735_805_6).abs() < 1e-15);
    }

    #[test]
    fn flux_vanishes_at_base() {
        let eu = Euler::new(EulerParams::default()).unwrap();
        assert!(eu.flux(&State::zeros(3)).norm() < 1e-15);
    }

    #[test]
    fn primitive_round_trip() {
        let eu = Euler::new(EulerParams::default()).unwrap();
        let u = eu.from_primitive(1.02, -0.03, 0.97);
        let p = eu.primitive(&u);
        assert!((p.rho - 1.02).abs() < 1e-14);
        assert!((p.v + 0.03).abs() < 1e-14);
        assert!((p.e - 0.97).abs() < 1e-14);
    }

    #[test]
    fn analytic_jacobian_matches_differences() {
        let eu = Euler::new(EulerParams::default()).unwrap();
        let u = State::from_slice(&[0.02, -0.01, 0.03]);
        let a = eu.jacobian(&u);
        for j in 0..3 {
            let h = 1e-6;
            let mut up = u;
            let mut dn = u;
            up[j] += h;
            dn[j] -= h;
            let col = (eu.flux(&up) - eu.flux(&dn)) * (0.5 / h);
            assert!((col - a.col(j)).norm() < 1e-8);
        }
    }
}

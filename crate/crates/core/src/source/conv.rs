use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::{check_dim, SourceConstants, SourceKind, SourceOp};
use crate::error::{Error, Result};
use crate::pcfn::field::KernelFn;
use crate::pcfn::{ConvTerm, ExpKernel, Field, PcFn, QuadTerm};
use crate::state::State;
use crate::system::box_samples;

/// Pointwise map `Ω → R^n` with `map(0) = 0`.
pub type PointMap = Arc<dyn Fn(&State) -> State + Send + Sync>;

/// Scalar kernel feeding component `col` of `h(u)` into component `row` of `G`.
#[derive(Debug, Clone)]
pub struct KernelEntry {
    pub row: usize,
    pub col: usize,
    pub kernel: ExpKernel,
}

/// Quadrature kernel entry with support `[−radius, radius]` and L¹ norm.
#[derive(Clone)]
pub struct QuadKernelEntry {
    pub row: usize,
    pub col: usize,
    pub kernel: KernelFn,
    pub radius: f64,
    pub l1_norm: f64,
}

/// `G(u) = g(u) + K ∗ h(u)` with a matrix of scalar kernels.
#[derive(Clone)]
pub struct ConvolutionSource {
    name: String,
    dim: usize,
    g: PointMap,
    h: PointMap,
    kernels: Vec<KernelEntry>,
    quad: Vec<QuadKernelEntry>,
    lip_g: f64,
    lip_h: f64,
}

impl core::fmt::Debug for ConvolutionSource {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("ConvolutionSource")
            .field("name", &self.name)
            .field("kernels", &self.kernels)
            .field("lip_g", &self.lip_g)
            .field("lip_h", &self.lip_h)
            .finish()
    }
}

/// Frobenius norm of the Jacobian of `map` at `u` (central differences).
fn jacobian_frobenius(map: &PointMap, u: &State) -> f64 {
    let n = u.len();
    let mut acc = 0.0;
    for j in 0..n {
        let h = 1e-6 * (1.0 + u[j].abs());
        let mut up = *u;
        let mut dn = *u;
        up[j] += h;
        dn[j] -= h;
        let d = (map(&up) - map(&dn)) * (1.0 / (2.0 * h));
        acc += d.dot(&d);
    }
    crate::math::sqrt(acc)
}

/// Upper estimate of the Lipschitz constant of `map` over the box `omega`:
/// the sampled maximum of the Jacobian's Frobenius norm times `margin`.
pub fn sampled_lipschitz(map: &PointMap, omega: &State, margin: f64) -> f64 {
    box_samples(omega, 256)
        .iter()
        .map(|u| jacobian_frobenius(map, u))
        .fold(0.0, f64::max)
        * margin
}

impl ConvolutionSource {
    /// Build with declared Lipschitz constants of `g` and `h`.
    pub fn new(
        name: &str,
        dim: usize,
        g: PointMap,
        h: PointMap,
        kernels: Vec<KernelEntry>,
        lip_g: f64,
        lip_h: f64,
    ) -> Result<Self> {
        let zero = State::zeros(dim);
        if !g(&zero).is_zero() || !h(&zero).is_zero() {
            return Err(Error::InvalidParameter(String::from(
                "g(0) and h(0) must vanish",
            )));
        }
        for k in &kernels {
            if k.row >= dim || k.col >= dim {
                return Err(Error::InvalidParameter(String::from(
                    "kernel entry out of range",
                )));
            }
        }
        if !(lip_g >= 0.0 && lip_h >= 0.0) {
            return Err(Error::InvalidParameter(String::from(
                "Lipschitz constants must be nonnegative",
            )));
        }
        Ok(ConvolutionSource {
            name: String::from(name),
            dim,
            g,
            h,
            kernels,
            quad: Vec::new(),
            lip_g,
            lip_h,
        })
    }

    /// Add a general kernel evaluated by quadrature; results become approximate.
    pub fn with_quadrature_kernel(mut self, entry: QuadKernelEntry) -> Self {
        self.quad.push(entry);
        self
    }

    /// Operator bound of the kernel matrix in L¹: the largest entry norm when
    /// the matrix is diagonal, the Frobenius combination otherwise.
    pub fn kernel_norm(&self) -> f64 {
        let mut entries: Vec<(usize, usize, f64)> = self
            .kernels
            .iter()
            .map(|k| (k.row, k.col, k.kernel.l1_norm()))
            .collect();
        entries.extend(self.quad.iter().map(|q| (q.row, q.col, q.l1_norm)));
        let mut combined: Vec<(usize, usize, f64)> = Vec::new();
        for (r, c, v) in entries {
            match combined.iter_mut().find(|e| e.0 == r && e.1 == c) {
                Some(e) => e.2 += v,
                None => combined.push((r, c, v)),
            }
        }
        if combined.iter().all(|e| e.0 == e.1) {
            combined.iter().map(|e| e.2).fold(0.0, f64::max)
        } else {
            crate::math::sqrt(combined.iter().map(|e| e.2 * e.2).sum())
        }
    }

    pub fn lip_g(&self) -> f64 {
        self.lip_g
    }
    pub fn lip_h(&self) -> f64 {
        self.lip_h
    }

    /// `g(u)` as a piecewise-constant function.
    pub fn local_part(&self, u: &PcFn) -> Result<PcFn> {
        let g = &self.g;
        let v = u.map(|s| g(s))?;
        if v.values().iter().any(|s| !s.is_finite()) {
            return Err(Error::OutsideDomain);
        }
        Ok(v)
    }

    /// `K ∗ h(u)` alone.
    pub fn nonlocal_part(&self, u: &PcFn) -> Result<Field> {
        let h = &self.h;
        let hu = u.map(|s| h(s))?;
        if hu.values().iter().any(|s| !s.is_finite()) {
            return Err(Error::OutsideDomain);
        }
        let mut f = Field::zero(self.dim);
        for k in &self.kernels {
            let density = Arc::new(hu.component(k.col));
            for &(c, r) in k.kernel.terms() {
                f.push_conv(ConvTerm {
                    component: k.row,
                    coeff: c,
                    rate: r,
                    density: density.clone(),
                });
            }
        }
        for q in &self.quad {
            let density = Arc::new(hu.component(q.col));
            f.push_quad(QuadTerm {
                component: q.row,
                coeff: 1.0,
                kernel: q.kernel.clone(),
                radius: q.radius,
                density,
            });
        }
        Ok(f)
    }
}

impl SourceOp for ConvolutionSource {
    fn name(&self) -> &str {
        &self.name
    }
    fn dim(&self) -> usize {
        self.dim
    }
    fn kind(&self) -> SourceKind {
        SourceKind::Convolution
    }
    fn constants(&self) -> SourceConstants {
        let l = self.lip_g + self.kernel_norm() * self.lip_h;
        SourceConstants {
            l1: l,
            l2: l,
            l3: 0.0,
        }
    }
    fn apply(&self, u: &PcFn) -> Result<Field> {
        check_dim(self.dim, u)?;
        let mut f = self.nonlocal_part(u)?;
        f.local = self.local_part(u)?;
        Ok(f)
    }
    fn is_approximate(&self) -> bool {
        !self.quad.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar_nonlocal() -> ConvolutionSource {
        let g: PointMap = Arc::new(|u: &State| -*u);
        let h: PointMap = Arc::new(|u: &State| *u);
        let k = KernelEntry {
            row: 0,
            col: 0,
            kernel: ExpKernel::single(0.5, 1.0).unwrap(),
        };
        ConvolutionSource::new("nonlocal", 1, g, h, alloc::vec![k], 1.0, 1.0).unwrap()
    }

    #[test]
    fn value_at_origin_before_projection() {
        let u = PcFn::indicator(0.0, 1.0, State::scalar(1.0)).unwrap();
        let f = scalar_nonlocal().apply(&u).unwrap();
        // right-continuous local part is −1 at 0; the convolution part is ½(1−e^{−1})
        let conv = f.eval(0.0)[0] - f.local.eval(0.0)[0];
        assert!((conv - 0.5 * (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        assert!((f.eval(-1e-9)[0] - 0.316_060_279_414_278_8).abs() < 1e-8);
    }

    #[test]
    fn declared_constants() {
        let c = scalar_nonlocal().constants();
        assert_eq!((c.l1, c.l2, c.l3), (2.0, 2.0, 0.0));
    }

    #[test]
    fn nonvanishing_maps_rejected() {
        let g: PointMap = Arc::new(|u: &State| *u + State::scalar(1.0));
        let h: PointMap = Arc::new(|u: &State| *u);
        assert!(ConvolutionSource::new("bad", 1, g, h, Vec::new(), 1.0, 1.0).is_err());
    }

    #[test]
    fn quadrature_kernel_agrees_with_closed_form() {
        let g: PointMap = Arc::new(|u: &State| -*u);
        let h: PointMap = Arc::new(|u: &State| *u);
        let exact = scalar_nonlocal();
        let approx = ConvolutionSource::new("q", 1, g, h, Vec::new(), 1.0, 1.0)
            .unwrap()
            .with_quadrature_kernel(QuadKernelEntry {
                row: 0,
                col: 0,
                kernel: Arc::new(|x: f64| 0.5 * (-x.abs()).exp()),
                radius: 40.0,
                l1_norm: 1.0,
            });
        assert!(approx.is_approximate());
        let u = PcFn::scalar(&[-0.5, 0.25, 1.0], &[1.0, -0.5]).unwrap();
        let a = exact.apply(&u).unwrap().project(4);
        let b = approx.apply(&u).unwrap().project(4);
        assert!(a.l1_dist(&b).unwrap() < 1e-8);
    }
}

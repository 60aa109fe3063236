//! Piecewise-smooth fields `local + Σ c·e^{−r|·|} ∗ w`, the exact form of a
//! nonlocal source evaluated on piecewise-constant data.

use alloc::sync::Arc;
use alloc::vec::Vec;

use super::PcFn;
use crate::error::{Error, Result};
use crate::math::{bisect, ceil, exp, gauss_legendre, one_minus_exp_over};
use crate::state::State;

/// One exponential convolution term `coeff·e^{−rate|·|} ∗ density`, added to `component`.
#[derive(Debug, Clone)]
pub struct ConvTerm {
    pub component: usize,
    pub coeff: f64,
    pub rate: f64,
    /// Scalar piecewise-constant density.
    pub density: Arc<PcFn>,
}

/// Kernel function for quadrature-based convolution.
pub type KernelFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A convolution with an arbitrary compactly supported kernel, evaluated by
/// Gauss-Legendre quadrature. Results involving it are approximate.
#[derive(Clone)]
pub struct QuadTerm {
    pub component: usize,
    pub coeff: f64,
    pub kernel: KernelFn,
    /// Kernel vanishes outside `[−radius, radius]`.
    pub radius: f64,
    pub density: Arc<PcFn>,
}

impl core::fmt::Debug for QuadTerm {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("QuadTerm")
            .field("component", &self.component)
            .field("coeff", &self.coeff)
            .field("radius", &self.radius)
            .finish()
    }
}

const QUAD_PANELS: usize = 4;

impl QuadTerm {
    fn eval(&self, x: f64) -> f64 {
        let d = &*self.density;
        let mut acc = 0.0;
        for (k, w) in d.breaks().windows(2).enumerate() {
            let v = d.values()[k + 1][0];
            if v == 0.0 {
                continue;
            }
            let a = w[0].max(x - self.radius);
            let b = w[1].min(x + self.radius);
            if b <= a {
                continue;
            }
            let k = &self.kernel;
            // split at the kernel's center where it may have a kink
            if a < x && x < b {
                acc += v * gauss_legendre(|y| k(x - y), a, x, QUAD_PANELS);
                acc += v * gauss_legendre(|y| k(x - y), x, b, QUAD_PANELS);
            } else {
                acc += v * gauss_legendre(|y| k(x - y), a, b, QUAD_PANELS);
            }
        }
        self.coeff * acc
    }
}

/// Jumps `(x, Δ)` of a scalar density.
fn scalar_jumps(d: &PcFn) -> Vec<(f64, f64)> {
    d.jumps().map(|(x, l, r)| (x, r[0] - l[0])).collect()
}

/// Exponential sums at each node: `a_incl = Σ_{x_k ≤ y} Δ_k e^{−r(y−x_k)}`,
/// `b_incl = Σ_{x_k ≥ y} Δ_k e^{−r(x_k−y)}`, and the jump sitting exactly at `y`.
struct Sweep {
    a_incl: Vec<f64>,
    b_incl: Vec<f64>,
    at: Vec<f64>,
}

fn sweep(jumps: &[(f64, f64)], rate: f64, nodes: &[f64]) -> Sweep {
    let n = nodes.len();
    let mut a_incl = alloc::vec![0.0; n];
    let mut b_incl = alloc::vec![0.0; n];
    let mut at = alloc::vec![0.0; n];
    let (mut acc, mut pos, mut k) = (0.0f64, f64::NEG_INFINITY, 0usize);
    for (i, &y) in nodes.iter().enumerate() {
        while k < jumps.len() && jumps[k].0 <= y {
            let (x, d) = jumps[k];
            acc = if acc == 0.0 {
                d
            } else {
                acc * exp(-rate * (x - pos)) + d
            };
            pos = x;
            if x == y {
                at[i] += d;
            }
            k += 1;
        }
        if acc != 0.0 {
            acc *= exp(-rate * (y - pos));
        }
        pos = y;
        a_incl[i] = acc;
    }
    let (mut acc, mut pos) = (0.0f64, f64::INFINITY);
    let mut k = jumps.len();
    for (i, &y) in nodes.iter().enumerate().rev() {
        while k > 0 && jumps[k - 1].0 >= y {
            let (x, d) = jumps[k - 1];
            acc = if acc == 0.0 {
                d
            } else {
                acc * exp(-rate * (pos - x)) + d
            };
            pos = x;
            k -= 1;
        }
        if acc != 0.0 {
            acc *= exp(-rate * (pos - y));
        }
        pos = y;
        b_incl[i] = acc;
    }
    Sweep { a_incl, b_incl, at }
}

/// Sorted union of two sorted lists without duplicates.
fn merge_sorted(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let x = match (a.get(i), b.get(j)) {
            (Some(&p), Some(&q)) => p.min(q),
            (Some(&p), None) => p,
            (None, Some(&q)) => q,
            (None, None) => unreachable!(),
        };
        if i < a.len() && a[i] == x {
            i += 1;
        }
        if j < b.len() && b[j] == x {
            j += 1;
        }
        out.push(x);
    }
    out
}

/// A vector field `local(x) + Σ terms(x)` with piecewise-constant `local`.
#[derive(Debug, Clone)]
pub struct Field {
    dim: usize,
    pub local: PcFn,
    pub conv: Vec<ConvTerm>,
    pub quad: Vec<QuadTerm>,
}

/// Per-interval description of one exponential term: value
/// `(c/r)(2w − A e^{−r(x−p)} + B e^{−r(q−x)})` on `[p, q]`.
#[derive(Clone, Copy)]
struct Piece {
    component: usize,
    c: f64,
    r: f64,
    w: f64,
    a: f64,
    b: f64,
    p: f64,
    q: f64,
}

impl Piece {
    #[inline]
    fn value(&self, x: f64) -> f64 {
        let ea = if self.a == 0.0 {
            0.0
        } else {
            self.a * exp(-self.r * (x - self.p))
        };
        let eb = if self.b == 0.0 {
            0.0
        } else {
            self.b * exp(-self.r * (self.q - x))
        };
        self.c / self.r * (2.0 * self.w - ea + eb)
    }
    #[inline]
    fn deriv(&self, x: f64) -> f64 {
        let ea = if self.a == 0.0 {
            0.0
        } else {
            self.a * exp(-self.r * (x - self.p))
        };
        let eb = if self.b == 0.0 {
            0.0
        } else {
            self.b * exp(-self.r * (self.q - x))
        };
        self.c * (ea + eb)
    }
}

impl Field {
    pub fn zero(dim: usize) -> Self {
        Field {
            dim,
            local: PcFn::zero(dim),
            conv: Vec::new(),
            quad: Vec::new(),
        }
    }

    pub fn from_local(local: PcFn) -> Self {
        Field {
            dim: local.dim(),
            local,
            conv: Vec::new(),
            quad: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The piecewise-constant part.
    pub fn local(&self) -> &PcFn {
        &self.local
    }

    /// True when quadrature terms are present.
    pub fn is_approximate(&self) -> bool {
        !self.quad.is_empty()
    }

    pub fn push_conv(&mut self, term: ConvTerm) {
        debug_assert!(term.component < self.dim && term.density.dim() == 1);
        if term.coeff != 0.0 && !term.density.is_zero() {
            self.conv.push(term);
        }
    }

    pub fn push_quad(&mut self, term: QuadTerm) {
        if term.coeff != 0.0 && !term.density.is_zero() {
            self.quad.push(term);
        }
    }

    pub fn scale(&self, k: f64) -> Field {
        let mut f = self.clone();
        f.local = f.local.scale(k);
        for t in &mut f.conv {
            t.coeff *= k;
        }
        for t in &mut f.quad {
            t.coeff *= k;
        }
        f
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let mut f = self.clone();
        f.local = self.local.sub(&other.local)?;
        let neg = other.scale(-1.0);
        f.conv.extend(neg.conv);
        f.quad.extend(neg.quad);
        Ok(f)
    }

    pub fn eval(&self, x: f64) -> State {
        let mut v = self.local.eval(x);
        for t in &self.conv {
            let (mut a, mut b) = (0.0, 0.0);
            for (xk, l, r) in t.density.jumps() {
                let d = r[0] - l[0];
                if xk <= x {
                    a += d * exp(-t.rate * (x - xk));
                } else {
                    b += d * exp(-t.rate * (xk - x));
                }
            }
            let w = t.density.eval(x)[0];
            v[t.component] += t.coeff / t.rate * (2.0 * w - a + b);
        }
        for t in &self.quad {
            v[t.component] += t.eval(x);
        }
        v
    }

    /// Evaluate at sorted points in one sweep per term.
    pub fn eval_sorted(&self, xs: &[f64]) -> Vec<State> {
        let mut out: Vec<State> = xs.iter().map(|&x| self.local.eval(x)).collect();
        for t in &self.conv {
            let jumps = scalar_jumps(&t.density);
            let sw = sweep(&jumps, t.rate, xs);
            for (i, &x) in xs.iter().enumerate() {
                let w = t.density.eval(x)[0];
                let b_excl = sw.b_incl[i] - sw.at[i];
                out[i][t.component] += t.coeff / t.rate * (2.0 * w - sw.a_incl[i] + b_excl);
            }
        }
        for t in &self.quad {
            for (i, &x) in xs.iter().enumerate() {
                out[i][t.component] += t.eval(x);
            }
        }
        out
    }

    /// Integrals of the convolution terms over consecutive cells of a sorted partition.
    fn conv_cell_integrals(&self, partition: &[f64]) -> Vec<State> {
        let cells = partition.len().saturating_sub(1);
        let mut out = alloc::vec![State::zeros(self.dim); cells];
        if cells == 0 {
            return out;
        }
        let (lo, hi) = (partition[0], partition[cells]);
        for t in &self.conv {
            let jumps = scalar_jumps(&t.density);
            let inner: Vec<f64> = jumps
                .iter()
                .map(|j| j.0)
                .filter(|&x| x > lo && x < hi)
                .collect();
            let nodes = merge_sorted(partition, &inner);
            let sw = sweep(&jumps, t.rate, &nodes);
            let k = t.coeff / t.rate;
            let mut cell = 0usize;
            for i in 0..nodes.len() - 1 {
                let (a, b) = (nodes[i], nodes[i + 1]);
                while cell + 1 < cells && partition[cell + 1] <= a {
                    cell += 1;
                }
                let h = b - a;
                let w = t.density.eval(0.5 * (a + b))[0];
                let phi = h * one_minus_exp_over(t.rate * h);
                let integral = k * (2.0 * w * h - sw.a_incl[i] * phi + sw.b_incl[i + 1] * phi);
                out[cell][t.component] += integral;
            }
        }
        for t in &self.quad {
            for c in 0..cells {
                let (a, b) = (partition[c], partition[c + 1]);
                out[c][t.component] += gauss_legendre(|x| t.eval(x), a, b, 2);
            }
        }
        out
    }

    /// `∫_a^b` of the whole field, componentwise.
    pub fn integral_on(&self, a: f64, b: f64) -> State {
        let mut v = self.local.integral_on(a, b);
        if b > a {
            v += self.conv_cell_integrals(&[a, b])[0];
        }
        v
    }

    /// Cell averages on the mesh used by [`PcFn::project`].
    pub fn project(&self, n: usize) -> PcFn {
        let local = self.local.project(n);
        if self.conv.is_empty() && self.quad.is_empty() {
            return local;
        }
        let nf = n as f64;
        let k_lo: i64 = -1 - (n as i64) * (n as i64);
        let k_hi: i64 = -1 + (n as i64) * (n as i64);
        let partition: Vec<f64> = (k_lo..=k_hi + 1).map(|k| k as f64 / nf).collect();
        let ints = self.conv_cell_integrals(&partition);
        let mut values = Vec::with_capacity(ints.len() + 2);
        values.push(State::zeros(self.dim));
        values.extend(ints.into_iter().map(|v| v * nf));
        values.push(State::zeros(self.dim));
        let conv = PcFn::from_raw(self.dim, partition, values);
        local.add(&conv).expect("dimensions agree")
    }

    /// All breakpoints of the local part and of every density, sorted.
    fn nodes(&self) -> Vec<f64> {
        let mut nodes = self.local.breaks().to_vec();
        for t in &self.conv {
            nodes = merge_sorted(&nodes, t.density.breaks());
        }
        nodes
    }

    fn max_rate(&self) -> f64 {
        self.conv.iter().map(|t| t.rate).fold(0.0, f64::max)
    }

    fn min_rate(&self) -> f64 {
        self.conv
            .iter()
            .map(|t| t.rate)
            .fold(f64::INFINITY, f64::min)
    }

    /// Visit each smooth interval, including truncated tails, with the
    /// constant local value and the exponential pieces living on it.
    fn for_each_interval(&self, mut f: impl FnMut(f64, f64, State, &[Piece])) {
        let nodes = self.nodes();
        if nodes.is_empty() {
            return;
        }
        let sweeps: Vec<(Sweep, &ConvTerm)> = self
            .conv
            .iter()
            .map(|t| (sweep(&scalar_jumps(&t.density), t.rate, &nodes), t))
            .collect();
        let tail = 40.0 / self.min_rate();
        let m = nodes.len();
        let mut pieces: Vec<Piece> = Vec::with_capacity(sweeps.len());
        for j in 0..=m {
            let (p, q) = if j == 0 {
                (nodes[0] - tail, nodes[0])
            } else if j == m {
                (nodes[m - 1], nodes[m - 1] + tail)
            } else {
                (nodes[j - 1], nodes[j])
            };
            let mid = 0.5 * (p + q);
            pieces.clear();
            for (sw, t) in &sweeps {
                let a = if j == 0 { 0.0 } else { sw.a_incl[j - 1] };
                let b = if j == m { 0.0 } else { sw.b_incl[j] };
                let w = if j == 0 || j == m {
                    0.0
                } else {
                    t.density.eval(mid)[0]
                };
                if a == 0.0 && b == 0.0 && w == 0.0 {
                    continue;
                }
                pieces.push(Piece {
                    component: t.component,
                    c: t.coeff,
                    r: t.rate,
                    w,
                    a,
                    b,
                    p,
                    q,
                });
            }
            f(p, q, self.local.eval(mid), &pieces);
        }
    }

    fn active_components(pieces: &[Piece]) -> (usize, Option<usize>) {
        let first = pieces.first().map(|pc| pc.component);
        match first {
            None => (0, None),
            Some(c) if pieces.iter().all(|pc| pc.component == c) => (1, first),
            Some(_) => (2, first),
        }
    }

    fn panels_for(&self, p: f64, q: f64) -> usize {
        let r = self.max_rate().max(1e-300);
        (ceil((q - p) * r * 2.0) as usize).clamp(2, 4096)
    }

    /// Total variation: local jumps plus `∫‖f'‖` on smooth intervals.
    pub fn tv(&self) -> f64 {
        if !self.quad.is_empty() {
            return self.sampled().0;
        }
        let mut total = self.local.tv();
        if self.conv.is_empty() {
            return total;
        }
        self.for_each_interval(|p, q, _local, pieces| {
            if pieces.is_empty() {
                return;
            }
            let (count, first) = Self::active_components(pieces);
            if count == 1 {
                let i = first.unwrap();
                let value = |x: f64| {
                    pieces
                        .iter()
                        .filter(|pc| pc.component == i)
                        .map(|pc| pc.value(x))
                        .sum::<f64>()
                };
                let deriv = |x: f64| {
                    pieces
                        .iter()
                        .filter(|pc| pc.component == i)
                        .map(|pc| pc.deriv(x))
                        .sum::<f64>()
                };
                let pts = monotone_split(&deriv, p, q, pieces.len());
                for w in pts.windows(2) {
                    total += (value(w[1]) - value(w[0])).abs();
                }
            } else {
                let panels = self.panels_for(p, q);
                total += gauss_legendre(
                    |x| {
                        let mut d = State::zeros(self.dim);
                        for pc in pieces {
                            d[pc.component] += pc.deriv(x);
                        }
                        d.norm()
                    },
                    p,
                    q,
                    panels,
                );
            }
        });
        total
    }

    /// `∫‖f‖ dx`.
    pub fn l1_norm(&self) -> f64 {
        if !self.quad.is_empty() {
            return self.sampled().1;
        }
        if self.conv.is_empty() {
            return self.local.l1_norm();
        }
        let mut total = 0.0;
        self.for_each_interval(|p, q, local, pieces| {
            let norm_at = |x: f64| {
                let mut v = local;
                for pc in pieces {
                    v[pc.component] += pc.value(x);
                }
                v.norm()
            };
            if pieces.is_empty() {
                total += (q - p) * local.norm();
                return;
            }
            let (count, first) = Self::active_components(pieces);
            if count == 1 {
                let i = first.unwrap();
                let value = |x: f64| {
                    local[i]
                        + pieces
                            .iter()
                            .filter(|pc| pc.component == i)
                            .map(|pc| pc.value(x))
                            .sum::<f64>()
                };
                let deriv = |x: f64| {
                    pieces
                        .iter()
                        .filter(|pc| pc.component == i)
                        .map(|pc| pc.deriv(x))
                        .sum::<f64>()
                };
                let mono = monotone_split(&deriv, p, q, pieces.len());
                for w in mono.windows(2) {
                    let (a, b) = (w[0], w[1]);
                    let (fa, fb) = (value(a), value(b));
                    let mut cuts = alloc::vec![a];
                    if fa * fb < 0.0 {
                        cuts.push(bisect(&value, a, b));
                    }
                    cuts.push(b);
                    for c in cuts.windows(2) {
                        let panels = self.panels_for(c[0], c[1]);
                        total += gauss_legendre(&norm_at, c[0], c[1], panels);
                    }
                }
            } else {
                let panels = self.panels_for(p, q);
                total += gauss_legendre(&norm_at, p, q, panels);
            }
        });
        total
    }

    /// Dense polyline fallback for quadrature kernels: `(tv, l1)`.
    fn sampled(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut pad: f64 = 0.0;
        let mut widen = |s: Option<(f64, f64)>, r: f64| {
            if let Some((a, b)) = s {
                lo = lo.min(a);
                hi = hi.max(b);
            }
            pad = pad.max(r);
        };
        widen(self.local.support(), 0.0);
        for t in &self.quad {
            widen(t.density.support(), t.radius);
        }
        for t in &self.conv {
            widen(t.density.support(), 40.0 / t.rate);
        }
        if !lo.is_finite() {
            return (0.0, 0.0);
        }
        let (lo, hi) = (lo - pad, hi + pad);
        let m = 20_000usize;
        let h = (hi - lo) / m as f64;
        let xs: Vec<f64> = (0..=m).map(|i| lo + h * i as f64).collect();
        let vals = self.eval_sorted(&xs);
        let (mut tv, mut l1) = (0.0, 0.0);
        for i in 1..vals.len() {
            tv += (vals[i] - vals[i - 1]).norm();
            l1 += 0.5 * h * (vals[i].norm() + vals[i - 1].norm());
        }
        (tv, l1)
    }

    /// Maximum Euclidean norm over sampled points (rough sup-norm probe).
    pub fn sup_norm_sampled(&self, xs: &[f64]) -> f64 {
        self.eval_sorted(xs)
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }
}

/// Split `[p, q]` at sign changes of `deriv`, found on a uniform sample grid.
fn monotone_split(deriv: &impl Fn(f64) -> f64, p: f64, q: f64, terms: usize) -> Vec<f64> {
    let samples = if terms <= 1 { 1 } else { 16 * terms };
    let mut pts = alloc::vec![p];
    let h = (q - p) / samples as f64;
    let mut x0 = p;
    let mut d0 = deriv(p);
    for k in 1..=samples {
        let x1 = if k == samples { q } else { p + h * k as f64 };
        let d1 = deriv(x1);
        if d0 * d1 < 0.0 {
            pts.push(bisect(deriv, x0, x1));
        }
        x0 = x1;
        d0 = d1;
    }
    pts.push(q);
    pts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::adaptive_gauss;

    fn box_density() -> Arc<PcFn> {
        Arc::new(PcFn::indicator(0.0, 1.0, State::scalar(1.0)).unwrap())
    }

    fn half_exp_of_box() -> Field {
        let mut f = Field::zero(1);
        f.push_conv(ConvTerm {
            component: 0,
            coeff: 0.5,
            rate: 1.0,
            density: box_density(),
        });
        f
    }

    #[test]
    fn value_at_origin_matches_closed_form() {
        let f = half_exp_of_box();
        let expect = 0.5 * (1.0 - (-1.0f64).exp());
        assert!((f.eval(0.0)[0] - expect).abs() < 1e-15);
        assert!((f.eval(0.0)[0] - 0.316_060_279_414_278_8).abs() < 1e-15);
    }

    #[test]
    fn sorted_evaluation_agrees_with_pointwise() {
        let f = half_exp_of_box();
        let xs = [-3.0, -0.5, 0.0, 0.3, 1.0, 1.7, 9.0];
        for (x, v) in xs.iter().zip(f.eval_sorted(&xs)) {
            assert!((f.eval(*x)[0] - v[0]).abs() < 1e-14, "x = {x}");
        }
    }

    #[test]
    fn integral_matches_quadrature() {
        let f = half_exp_of_box();
        for (a, b) in [(-2.0, 0.5), (0.2, 0.7), (0.5, 4.0), (-1.0, 3.0)] {
            let q = adaptive_gauss(|x| f.eval(x)[0], a, b, 1e-14);
            let exact = f.integral_on(a, b)[0];
            assert!((q - exact).abs() < 1e-12, "[{a},{b}] {q} vs {exact}");
        }
    }

    #[test]
    fn tv_and_l1_of_box_convolution() {
        let f = half_exp_of_box();
        // symmetric hump with peak at 1/2: TV = 2·f(1/2), mass 1
        let peak = f.eval(0.5)[0];
        assert!((f.tv() - 2.0 * peak).abs() < 1e-12);
        assert!((f.l1_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_density_gives_zero() {
        let mut f = Field::zero(1);
        f.push_conv(ConvTerm {
            component: 0,
            coeff: 1.0,
            rate: 1.0,
            density: Arc::new(PcFn::zero(1)),
        });
        assert_eq!(f.eval(0.3)[0], 0.0);
        assert_eq!(f.project(4), PcFn::zero(1));
    }
}

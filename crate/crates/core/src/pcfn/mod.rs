//! Piecewise-constant functions `R -> R^n` with zero tails.

pub(crate) mod field;
mod kernel;

pub use field::{ConvTerm, Field, QuadTerm};
pub use kernel::ExpKernel;

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{ceil, floor};
use crate::state::State;

/// Thresholds applied by [`PcFn::normalize`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normalize {
    /// Breakpoints closer than this are merged.
    pub xi_min: f64,
    /// Jumps with Euclidean norm below this are dropped.
    pub jump_min: f64,
}

impl Default for Normalize {
    fn default() -> Self {
        Normalize {
            xi_min: 1e-12,
            jump_min: 1e-14,
        }
    }
}

/// A piecewise-constant function with finitely many jumps and zero tails.
///
/// `values[k]` is the value on the open interval between `breaks[k-1]` and
/// `breaks[k]`; `values[0]` and the last value are exactly zero.
#[derive(Clone, PartialEq)]
pub struct PcFn {
    dim: usize,
    breaks: Vec<f64>,
    values: Vec<State>,
}

impl core::fmt::Debug for PcFn {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("PcFn")
            .field("breaks", &self.breaks)
            .field("values", &self.values)
            .finish()
    }
}

impl PcFn {
    pub fn zero(dim: usize) -> Self {
        PcFn {
            dim,
            breaks: Vec::new(),
            values: alloc::vec![State::zeros(dim)],
        }
    }

    /// Build from raw parts, validating and then normalizing.
    pub fn new(dim: usize, breaks: Vec<f64>, values: Vec<State>) -> Result<Self> {
        Self::with_normalize(dim, breaks, values, Normalize::default())
    }

    pub fn with_normalize(
        dim: usize,
        breaks: Vec<f64>,
        values: Vec<State>,
        opts: Normalize,
    ) -> Result<Self> {
        if dim == 0 || dim > crate::MAX_DIM {
            return Err(Error::InvalidPcFn("unsupported dimension"));
        }
        if values.len() != breaks.len() + 1 {
            return Err(Error::InvalidPcFn(
                "values must have one more entry than breakpoints",
            ));
        }
        if breaks.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidPcFn("non-finite breakpoint"));
        }
        if breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidPcFn(
                "breakpoints must be strictly increasing",
            ));
        }
        for v in &values {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: v.len(),
                });
            }
            if !v.is_finite() {
                return Err(Error::InvalidPcFn("non-finite value"));
            }
        }
        if !values[0].is_zero() || !values[values.len() - 1].is_zero() {
            return Err(Error::InvalidPcFn("tails must be exactly zero"));
        }
        let mut u = PcFn {
            dim,
            breaks,
            values,
        };
        u.normalize(opts);
        Ok(u)
    }

    /// Scalar step function from breakpoints and interior values.
    pub fn scalar(breaks: &[f64], interior: &[f64]) -> Result<Self> {
        let mut values = Vec::with_capacity(interior.len() + 2);
        values.push(State::zeros(1));
        values.extend(interior.iter().map(|&x| State::scalar(x)));
        values.push(State::zeros(1));
        PcFn::new(1, breaks.to_vec(), values)
    }

    /// `value` on `]a, b[`, zero elsewhere.
    pub fn indicator(a: f64, b: f64, value: State) -> Result<Self> {
        let z = State::zeros(value.len());
        PcFn::new(value.len(), alloc::vec![a, b], alloc::vec![z, value, z])
    }

    /// Internal constructor for data that is already valid up to normalization.
    pub(crate) fn from_raw(dim: usize, breaks: Vec<f64>, values: Vec<State>) -> Self {
        debug_assert_eq!(values.len(), breaks.len() + 1);
        let mut u = PcFn {
            dim,
            breaks,
            values,
        };
        u.normalize(Normalize::default());
        u
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }
    #[inline]
    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }
    #[inline]
    pub fn values(&self) -> &[State] {
        &self.values
    }
    pub fn num_jumps(&self) -> usize {
        self.breaks.len()
    }
    pub fn is_zero(&self) -> bool {
        self.breaks.is_empty()
    }

    /// Iterator over `(x, left value, right value)`.
    pub fn jumps(&self) -> impl Iterator<Item = (f64, State, State)> + '_ {
        self.breaks
            .iter()
            .enumerate()
            .map(move |(k, &x)| (x, self.values[k], self.values[k + 1]))
    }

    /// Support interval `[first break, last break]`, if nonzero.
    pub fn support(&self) -> Option<(f64, f64)> {
        Some((*self.breaks.first()?, *self.breaks.last()?))
    }

    fn interval_index(&self, x: f64) -> usize {
        // number of breakpoints <= x: right-continuous convention
        self.breaks.partition_point(|&b| b <= x)
    }

    /// Right-continuous evaluation.
    pub fn eval(&self, x: f64) -> State {
        self.values[self.interval_index(x)]
    }

    pub fn left_limit(&self, x: f64) -> State {
        self.values[self.breaks.partition_point(|&b| b < x)]
    }

    pub fn right_limit(&self, x: f64) -> State {
        self.eval(x)
    }

    /// Total variation: sum of Euclidean jump norms.
    pub fn tv(&self) -> f64 {
        self.jumps().map(|(_, l, r)| (r - l).norm()).sum()
    }

    /// Variation over the open interval `]a, b[`.
    pub fn tv_on(&self, a: f64, b: f64) -> f64 {
        self.jumps()
            .filter(|(x, _, _)| *x > a && *x < b)
            .map(|(_, l, r)| (r - l).norm())
            .sum()
    }

    pub fn l1_norm(&self) -> f64 {
        self.breaks
            .windows(2)
            .enumerate()
            .map(|(k, w)| (w[1] - w[0]) * self.values[k + 1].norm())
            .sum()
    }

    /// `∫ u dx`, componentwise.
    pub fn integral(&self) -> State {
        let mut acc = State::zeros(self.dim);
        for (k, w) in self.breaks.windows(2).enumerate() {
            acc += self.values[k + 1] * (w[1] - w[0]);
        }
        acc
    }

    /// `∫_a^b u dx`, componentwise.
    pub fn integral_on(&self, a: f64, b: f64) -> State {
        let mut acc = State::zeros(self.dim);
        if b <= a {
            return acc;
        }
        let mut k = self.interval_index(a);
        let mut lo = a;
        while lo < b {
            let hi = if k < self.breaks.len() {
                self.breaks[k].min(b)
            } else {
                b
            };
            if hi > lo {
                acc += self.values[k] * (hi - lo);
            }
            lo = hi;
            k += 1;
        }
        acc
    }

    /// Exact `∫ ‖u − w‖` on the merged partition.
    pub fn l1_dist(&self, other: &PcFn) -> Result<f64> {
        self.check_dim(other)?;
        let mut total = 0.0;
        merge_walk(self, other, |a, b, u, w| total += (b - a) * (u - w).norm());
        Ok(total)
    }

    fn check_dim(&self, other: &PcFn) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(())
    }

    /// Pointwise combination on the merged partition. `f(0, 0)` must be zero.
    pub fn zip_with(&self, other: &PcFn, f: impl Fn(State, State) -> State) -> Result<PcFn> {
        let mut breaks = Vec::with_capacity(self.breaks.len() + other.breaks.len());
        let mut values = Vec::with_capacity(self.breaks.len() + other.breaks.len() + 1);
        let z0 = State::zeros(self.dim);
        let z1 = State::zeros(other.dim);
        let first = f(z0, z1);
        values.push(first);
        let (mut i, mut j) = (0, 0);
        let (ub, wb) = (&self.breaks, &other.breaks);
        while i < ub.len() || j < wb.len() {
            let x = match (ub.get(i), wb.get(j)) {
                (Some(&a), Some(&b)) => a.min(b),
                (Some(&a), None) => a,
                (None, Some(&b)) => b,
                (None, None) => unreachable!(),
            };
            if i < ub.len() && ub[i] == x {
                i += 1;
            }
            if j < wb.len() && wb[j] == x {
                j += 1;
            }
            breaks.push(x);
            values.push(f(self.values[i], other.values[j]));
        }
        let out_dim = first.len();
        if !first.is_zero() || !values.last().unwrap().is_zero() {
            return Err(Error::InvalidPcFn("pointwise map must send zero to zero"));
        }
        Ok(PcFn::from_raw(out_dim, breaks, values))
    }

    /// Pointwise map of values. `f(0)` must be zero.
    pub fn map(&self, f: impl Fn(&State) -> State) -> Result<PcFn> {
        let values: Vec<State> = self.values.iter().map(&f).collect();
        let dim = values[0].len();
        if !values[0].is_zero() || !values.last().unwrap().is_zero() {
            return Err(Error::InvalidPcFn("pointwise map must send zero to zero"));
        }
        Ok(PcFn::from_raw(dim, self.breaks.clone(), values))
    }

    pub fn add(&self, other: &PcFn) -> Result<PcFn> {
        self.check_dim(other)?;
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &PcFn) -> Result<PcFn> {
        self.check_dim(other)?;
        self.zip_with(other, |a, b| a - b)
    }

    /// `α·self + β·other`.
    pub fn lincomb(&self, alpha: f64, other: &PcFn, beta: f64) -> Result<PcFn> {
        self.check_dim(other)?;
        self.zip_with(other, |a, b| a * alpha + b * beta)
    }

    pub fn scale(&self, k: f64) -> PcFn {
        if k == 0.0 {
            return PcFn::zero(self.dim);
        }
        let values = self.values.iter().map(|v| *v * k).collect();
        PcFn::from_raw(self.dim, self.breaks.clone(), values)
    }

    /// Component `i` as a scalar function.
    pub fn component(&self, i: usize) -> PcFn {
        let values = self.values.iter().map(|v| State::scalar(v[i])).collect();
        PcFn::from_raw(1, self.breaks.clone(), values)
    }

    /// `x ↦ u(x − h)`.
    pub fn translate(&self, h: f64) -> PcFn {
        let breaks = self.breaks.iter().map(|b| b + h).collect();
        PcFn::from_raw(self.dim, breaks, self.values.clone())
    }

    /// `x ↦ u(λx)`: breakpoints divided by `λ`.
    pub fn dilate(&self, lambda: f64) -> Result<PcFn> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter(alloc::format!(
                "dilation factor {lambda}"
            )));
        }
        let breaks = self.breaks.iter().map(|b| b / lambda).collect();
        Ok(PcFn::from_raw(self.dim, breaks, self.values.clone()))
    }

    /// Canonicalize: merge breakpoints closer than `xi_min`, drop tiny jumps.
    pub fn normalize(&mut self, opts: Normalize) {
        let n = self.breaks.len();
        if n == 0 {
            return;
        }
        let mut breaks: Vec<f64> = Vec::with_capacity(n);
        let mut values: Vec<State> = Vec::with_capacity(n + 1);
        values.push(self.values[0]);
        for k in 0..n {
            let x = self.breaks[k];
            let right = self.values[k + 1];
            if let Some(&last) = breaks.last() {
                if x - last < opts.xi_min {
                    *values.last_mut().unwrap() = right;
                    continue;
                }
            }
            breaks.push(x);
            values.push(right);
        }
        let m = breaks.len();
        let mut out_b = Vec::with_capacity(m);
        let mut out_v = Vec::with_capacity(m + 1);
        out_v.push(values[0]);
        for k in 0..m {
            let cur = *out_v.last().unwrap();
            let right = values[k + 1];
            let last = k + 1 == m;
            let tiny = (right - cur).norm() < opts.jump_min;
            if tiny && !(last && !cur.is_zero()) {
                continue;
            }
            if right == cur {
                continue;
            }
            out_b.push(breaks[k]);
            out_v.push(right);
        }
        self.breaks = out_b;
        self.values = out_v;
    }

    /// Cell-average projection onto the mesh `]k/N, (k+1)/N]`,
    /// `k = −1−N² … −1+N²`, zero outside `[−N−1/N, N]`.
    pub fn project(&self, n: usize) -> PcFn {
        assert!(n >= 1, "projection resolution must be positive");
        let nf = n as f64;
        let k_lo: i64 = -1 - (n as i64) * (n as i64);
        let k_hi: i64 = -1 + (n as i64) * (n as i64);
        let cell = |k: i64| k as f64 / nf;
        let lo = cell(k_lo);
        let hi = cell(k_hi + 1);
        let mut dirty: Vec<i64> = Vec::new();
        for &b in &self.breaks {
            if b <= lo || b >= hi {
                continue;
            }
            let k = (ceil(b * nf) as i64 - 1).clamp(k_lo, k_hi);
            // guard against rounding in b*N
            let k = if b <= cell(k) {
                k - 1
            } else if b > cell(k + 1) {
                k + 1
            } else {
                k
            };
            if b == cell(k + 1) {
                continue;
            }
            if dirty.last() != Some(&k) {
                dirty.push(k);
            }
        }
        let mut breaks = Vec::with_capacity(2 * dirty.len() + 2);
        let mut values = Vec::with_capacity(2 * dirty.len() + 3);
        values.push(State::zeros(self.dim));
        // clean stretches may still contain breakpoints lying on cell boundaries
        let clean = |c: f64, a: f64, breaks: &mut Vec<f64>, values: &mut Vec<State>| {
            let i0 = self.breaks.partition_point(|&b| b <= c);
            let i1 = self.breaks.partition_point(|&b| b < a);
            let mut start = c;
            for &b in self.breaks[i0..i1].iter().chain(core::iter::once(&a)) {
                breaks.push(start);
                values.push(self.eval(0.5 * (start + b)));
                start = b;
            }
        };
        let mut cur = lo;
        for &k in &dirty {
            let a = cell(k);
            if a > cur {
                clean(cur, a, &mut breaks, &mut values);
            }
            let b = cell(k + 1);
            breaks.push(a);
            values.push(self.integral_on(a, b) * nf);
            cur = b;
        }
        if cur < hi {
            clean(cur, hi, &mut breaks, &mut values);
        }
        breaks.push(hi);
        values.push(State::zeros(self.dim));
        PcFn::from_raw(self.dim, breaks, values)
    }

    /// Sample the midpoint values on a uniform grid of spacing `h` over `[a, b]`.
    pub fn sample(&self, a: f64, b: f64, h: f64) -> Vec<(f64, State)> {
        let m = floor((b - a) / h) as usize;
        (0..m)
            .map(|i| {
                let x = a + (i as f64 + 0.5) * h;
                (x, self.eval(x))
            })
            .collect()
    }
}

/// Walk the merged partition of `u` and `w`, calling `f(a, b, u_val, w_val)`
/// on every bounded interval.
pub(crate) fn merge_walk(u: &PcFn, w: &PcFn, mut f: impl FnMut(f64, f64, State, State)) {
    let (ub, wb) = (&u.breaks, &w.breaks);
    let (mut i, mut j) = (0, 0);
    let mut prev: Option<f64> = None;
    while i < ub.len() || j < wb.len() {
        let x = match (ub.get(i), wb.get(j)) {
            (Some(&a), Some(&b)) => a.min(b),
            (Some(&a), None) => a,
            (None, Some(&b)) => b,
            (None, None) => unreachable!(),
        };
        if let Some(p) = prev {
            f(p, x, u.values[i], w.values[j]);
        }
        if i < ub.len() && ub[i] == x {
            i += 1;
        }
        if j < wb.len() && wb[j] == x {
            j += 1;
        }
        prev = Some(x);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn s(x: f64) -> State {
        State::scalar(x)
    }

    #[test]
    fn zero_has_no_variation() {
        assert_eq!(PcFn::zero(2).tv(), 0.0);
        assert_eq!(PcFn::zero(2).l1_norm(), 0.0);
    }

    #[test]
    fn bump_in_two_dimensions_has_tv_two() {
        let u = PcFn::indicator(0.0, 1.0, State::from_slice(&[1.0, 0.0])).unwrap();
        assert_eq!(u.tv(), 2.0);
    }

    #[test]
    fn unit_box_distance() {
        let u = PcFn::indicator(0.0, 1.0, s(1.0)).unwrap();
        assert_eq!(u.l1_dist(&PcFn::zero(1)).unwrap(), 1.0);
        assert_eq!(u.l1_dist(&u).unwrap(), 0.0);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let e = PcFn::zero(1).l1_dist(&PcFn::zero(2)).unwrap_err();
        assert_eq!(
            e,
            Error::DimensionMismatch {
                expected: 1,
                got: 2
            }
        );
    }

    #[test]
    fn invalid_tails_rejected() {
        let r = PcFn::new(1, vec![0.0], vec![s(0.0), s(1.0)]);
        assert!(r.is_err());
        let r = PcFn::new(1, vec![1.0, 0.0], vec![s(0.0), s(1.0), s(0.0)]);
        assert!(r.is_err());
    }

    #[test]
    fn normalization_merges_close_breakpoints() {
        let u = PcFn::new(
            1,
            vec![0.0, 1.0, 1.0 + 1e-13, 2.0],
            vec![s(0.0), s(1.0), s(5.0), s(2.0), s(0.0)],
        )
        .unwrap();
        assert_eq!(u.breaks(), &[0.0, 1.0, 2.0]);
        assert_eq!(u.eval(1.5), s(2.0));
    }

    #[test]
    fn normalization_drops_tiny_jumps() {
        let u = PcFn::new(
            1,
            vec![0.0, 1.0, 2.0],
            vec![s(0.0), s(1.0), s(1.0 + 1e-15), s(0.0)],
        )
        .unwrap();
        assert_eq!(u.breaks(), &[0.0, 2.0]);
    }

    #[test]
    fn projection_of_unit_box() {
        let u = PcFn::indicator(0.0, 1.0, s(1.0)).unwrap();
        let p = u.project(2);
        assert_eq!(p.breaks(), &[0.0, 1.0]);
        assert_eq!(p.eval(0.25), s(1.0));
        assert_eq!(p.eval(0.75), s(1.0));
    }

    #[test]
    fn projection_averages_split_cells() {
        let u = PcFn::indicator(0.25, 1.0, s(1.0)).unwrap();
        let p = u.project(2);
        assert_eq!(p.eval(0.25), s(0.5));
        assert_eq!(p.eval(0.75), s(1.0));
        assert_eq!(p.eval(1.25), s(0.0));
    }

    #[test]
    fn projection_truncates_outside_range() {
        let u = PcFn::indicator(-10.0, 10.0, s(1.0)).unwrap();
        let p = u.project(2);
        assert_eq!(p.breaks(), &[-2.5, 2.0]);
    }

    #[test]
    fn dilation_of_unit_box() {
        let u = PcFn::indicator(0.0, 1.0, s(1.0)).unwrap();
        let d = u.dilate(2.0).unwrap();
        assert_eq!(d.breaks(), &[0.0, 0.5]);
        assert_eq!(u.dilate(1.0).unwrap(), u);
        assert!(u.dilate(0.0).is_err());
    }

    #[test]
    fn integral_on_subinterval() {
        let u = PcFn::scalar(&[0.0, 1.0, 3.0], &[2.0, -1.0]).unwrap();
        assert_eq!(u.integral_on(0.5, 2.0), s(1.0 - 1.0));
        assert_eq!(u.integral(), s(0.0));
    }

    #[test]
    fn limits_at_breakpoints() {
        let u = PcFn::scalar(&[0.0, 1.0], &[2.0]).unwrap();
        assert_eq!(u.left_limit(0.0), s(0.0));
        assert_eq!(u.right_limit(0.0), s(2.0));
        assert_eq!(u.left_limit(1.0), s(2.0));
    }
}

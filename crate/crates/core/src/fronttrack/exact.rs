use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{ceil, gauss_legendre};
use crate::models::ConvexFlux;
use crate::pcfn::PcFn;
use crate::state::State;

/// Exact entropy solution of a scalar convex conservation law with
/// piecewise-constant data, from the Lax–Oleinik formula
/// `u(t, x) = (f')⁻¹((x − y*)/t)`, `y*` minimizing `U₀(y) + t·L((x − y)/t)`.
///
/// Candidates for `y*` are the interior of each constant piece (value `u_k`)
/// and each breakpoint (a centered fan). Candidate `2k` is piece `k`,
/// candidate `2k + 1` is breakpoint `k`; the minimizing index is
/// nondecreasing in `x`.
pub struct ScalarExact<'a> {
    flux: &'a dyn ConvexFlux,
    ys: Vec<f64>,
    us: Vec<f64>,
    /// `U₀(y_k)`.
    cum: Vec<f64>,
    t: f64,
    /// `(start, candidate)` segments covering the line, in order.
    segments: Vec<(f64, usize)>,
}

impl<'a> ScalarExact<'a> {
    pub fn new(flux: &'a dyn ConvexFlux, u: &PcFn, t: f64) -> Result<Self> {
        if u.dim() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: u.dim(),
            });
        }
        if !(t >= 0.0) {
            return Err(Error::InvalidParameter(alloc::format!("negative time {t}")));
        }
        let ys = u.breaks().to_vec();
        let us: Vec<f64> = u.values().iter().map(|v| v[0]).collect();
        let (lo, hi) = us
            .iter()
            .fold((0.0f64, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
        let mut last = f64::NEG_INFINITY;
        for k in 0..=64 {
            let d = flux.df(lo + (hi - lo) * k as f64 / 64.0);
            if k > 0 && !(d > last) && hi > lo {
                return Err(Error::NonConvexFlux);
            }
            last = d;
        }
        let mut cum = Vec::with_capacity(ys.len());
        let mut acc = 0.0;
        for k in 0..ys.len() {
            if k > 0 {
                acc += us[k] * (ys[k] - ys[k - 1]);
            }
            cum.push(acc);
        }
        let mut ex = ScalarExact {
            flux,
            ys,
            us,
            cum,
            t,
            segments: Vec::new(),
        };
        ex.segments = ex.find_segments();
        Ok(ex)
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    fn cost(&self, c: usize, x: f64) -> f64 {
        let (f, t, ys) = (self.flux, self.t, &self.ys);
        let j = ys.len();
        if c % 2 == 1 {
            let k = c / 2;
            return self.cum[k] + t * f.legendre((x - ys[k]) / t);
        }
        let k = c / 2;
        let uk = self.us[k];
        let q = f.df(uk);
        let y = x - t * q;
        let lo = if k == 0 { f64::NEG_INFINITY } else { ys[k - 1] };
        let hi = if k == j { f64::INFINITY } else { ys[k] };
        if !(y >= lo && y <= hi) {
            return f64::INFINITY;
        }
        let (ay, av) = if k < j {
            (ys[k], self.cum[k])
        } else {
            (ys[j - 1], self.cum[j - 1])
        };
        av + uk * (y - ay) + t * f.legendre(q)
    }

    fn candidate(&self, x: f64) -> usize {
        let mut best = (f64::INFINITY, 0);
        for c in 0..2 * self.ys.len() + 1 {
            let v = self.cost(c, x);
            if v < best.0 {
                best = (v, c);
            }
        }
        best.1
    }

    fn value(&self, c: usize, x: f64) -> f64 {
        let k = c / 2;
        if c.is_multiple_of(2) {
            return self.us[k];
        }
        let (a, b) = (self.us[k], self.us[k + 1]);
        self.flux
            .df_inv((x - self.ys[k]) / self.t)
            .clamp(a.min(b), a.max(b))
    }

    fn find_segments(&self) -> Vec<(f64, usize)> {
        let j = self.ys.len();
        if j == 0 || self.t == 0.0 {
            let mut s = alloc::vec![(f64::NEG_INFINITY, 0)];
            s.extend(self.ys.iter().enumerate().map(|(k, &y)| (y, 2 * (k + 1))));
            return s;
        }
        let smax = self
            .us
            .iter()
            .map(|&u| self.flux.df(u).abs())
            .fold(0.0, f64::max);
        let pad = self.t * smax + 1.0;
        let (a, b) = (self.ys[0] - pad, self.ys[j - 1] + pad);
        let mut out = alloc::vec![(f64::NEG_INFINITY, self.candidate(a))];
        self.split(a, b, self.candidate(a), self.candidate(b), &mut out);
        out
    }

    fn split(&self, a: f64, b: f64, ca: usize, cb: usize, out: &mut Vec<(f64, usize)>) {
        if ca == cb {
            return;
        }
        let m = 0.5 * (a + b);
        if b - a <= 4.0 * f64::EPSILON * (1.0 + a.abs().max(b.abs())) || m <= a || m >= b {
            out.push((b, cb));
            return;
        }
        let cm = self.candidate(m);
        self.split(a, m, ca, cm, out);
        self.split(m, b, cm, cb, out);
    }

    pub fn eval(&self, x: f64) -> f64 {
        if self.t == 0.0 || self.ys.is_empty() {
            return self.us[self.ys.partition_point(|&y| y <= x)];
        }
        self.value(self.segment_at(x), x)
    }

    /// Positions where the solution changes its representation: shocks and
    /// fan edges.
    pub fn transitions(&self) -> Vec<f64> {
        self.segments.iter().skip(1).map(|s| s.0).collect()
    }

    /// `∫ |u(t) − w|`, exact up to the quadrature of smooth fans.
    pub fn l1_dist(&self, w: &PcFn) -> Result<f64> {
        if w.dim() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: w.dim(),
            });
        }
        if self.t == 0.0 || self.ys.is_empty() {
            let u = PcFn::from_raw(
                1,
                self.ys.clone(),
                self.us.iter().map(|&v| State::scalar(v)).collect(),
            );
            return u.l1_dist(w);
        }
        let mut pts: Vec<f64> = self.transitions();
        pts.extend_from_slice(w.breaks());
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let mut total = 0.0;
        for p in pts.windows(2) {
            total += self.piece_dist(p[0], p[1], w.eval(0.5 * (p[0] + p[1]))[0]);
        }
        Ok(total)
    }

    fn segment_at(&self, x: f64) -> usize {
        self.segments[self.segments.partition_point(|s| s.0 <= x).max(1) - 1].1
    }

    fn piece_dist(&self, a: f64, b: f64, c: f64) -> f64 {
        if !(b > a) {
            return 0.0;
        }
        let cand = self.segment_at(0.5 * (a + b));
        if cand.is_multiple_of(2) {
            return (self.us[cand / 2] - c).abs() * (b - a);
        }
        let k = cand / 2;
        let root = self.ys[k] + self.t * self.flux.df(c);
        let f = |x: f64| (self.value(cand, x) - c).abs();
        if root > a && root < b {
            gauss_legendre(f, a, root, 4) + gauss_legendre(f, root, b, 4)
        } else {
            gauss_legendre(f, a, b, 4)
        }
    }

    /// Piecewise-constant approximation: constant pieces exact, fans replaced
    /// by their averages over cells of width at most `h`.
    pub fn to_pcfn(&self, h: f64) -> Result<PcFn> {
        if !(h > 0.0) {
            return Err(Error::InvalidParameter(alloc::format!(
                "cell width must be positive, got {h}"
            )));
        }
        if self.t == 0.0 || self.ys.is_empty() {
            return PcFn::new(
                1,
                self.ys.clone(),
                self.us.iter().map(|&v| State::scalar(v)).collect(),
            );
        }
        let mut breaks = Vec::new();
        let mut values = alloc::vec![State::zeros(1)];
        let segs = &self.segments;
        for (i, &(start, cand)) in segs.iter().enumerate().skip(1) {
            let end = segs.get(i + 1).map(|s| s.0);
            if cand.is_multiple_of(2) {
                breaks.push(start);
                values.push(State::scalar(self.us[cand / 2]));
                continue;
            }
            let end = end.unwrap_or(start);
            let m = ceil((end - start) / h).max(1.0) as usize;
            let dx = (end - start) / m as f64;
            for c in 0..m {
                let (a, b) = (
                    start + c as f64 * dx,
                    if c + 1 == m {
                        end
                    } else {
                        start + (c + 1) as f64 * dx
                    },
                );
                breaks.push(a);
                let avg = gauss_legendre(|x| self.value(cand, x), a, b, 2) / (b - a);
                values.push(State::scalar(avg));
            }
        }
        if let Some(v) = values.last_mut() {
            *v = State::zeros(1);
        }
        PcFn::new(1, breaks, values)
    }
}

use alloc::vec::Vec;

use super::{halton, FieldKind, SystemModel};
use crate::error::Result;
use crate::pcfn::PcFn;
use crate::state::{State, MAX_DIM};

/// Linear functional `V`, interaction potential `Q` and `Υ = V + C₀·Q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Glimm {
    pub v: f64,
    pub q: f64,
    pub upsilon: f64,
}

/// Strength vectors at each jump, in increasing position.
pub type StrengthProfile = Vec<(f64, State)>;

/// Sampled interactions per family pair used to calibrate `C₀`.
pub const C0_SAMPLES: u32 = 12;

impl SystemModel {
    /// Interaction amplification `K = max |E(u_L, u_R) − σ'e_i − σ''e_j|₁ / |σ'σ''|`
    /// over sampled approaching pairs: a wave `σ'` of family `i` from `u_L`
    /// followed by `σ''` of family `j ≤ i` (same-family pairs need a shock).
    /// Pairs leaving `Ω` or whose Riemann solve fails are skipped; errors if
    /// every sampled pair was skipped while some pair was attempted.
    pub fn interaction_constant(&self, samples: u32) -> Result<f64> {
        let n = self.dim();
        let w = self
            .omega()
            .as_slice()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        let amp = 0.25 * w;
        let mut k: f64 = 0.0;
        let (mut solved, mut last_err) = (0usize, None);
        for m in 1..=samples {
            let ul = {
                let mut s = State::zeros(n);
                for c in 0..n {
                    s[c] = (halton(m, 7 + 2 * c as u32) - 0.5) * self.omega()[c];
                }
                s
            };
            let a = amp * (2.0 * halton(m, 2) - 1.0);
            let b = amp * (2.0 * halton(m, 3) - 1.0);
            if a == 0.0 || b == 0.0 {
                continue;
            }
            for i in 0..n {
                for j in 0..=i {
                    let gnl = self.field_kind(i) == FieldKind::GenuinelyNonlinear;
                    if i == j && !(gnl && a.min(b) < 0.0) {
                        continue;
                    }
                    let Ok(um) = self.lax_curve(i, a, &ul) else {
                        continue;
                    };
                    let Ok(ur) = self.lax_curve(j, b, &um) else {
                        continue;
                    };
                    let mut out = match self.riemann_strengths(&ul, &ur, None) {
                        Ok(o) => o,
                        Err(e) => {
                            last_err = Some(e);
                            continue;
                        }
                    };
                    solved += 1;
                    out[i] -= a;
                    out[j] -= b;
                    k = k.max(out.as_slice().iter().map(|x| x.abs()).sum::<f64>() / (a * b).abs());
                }
            }
        }
        match last_err {
            Some(e) if solved == 0 => Err(e),
            _ => Ok(k),
        }
    }

    /// `C₀ = max(1, 4K)` with `K` from [`SystemModel::interaction_constant`].
    pub fn calibrated_c0(&self) -> Result<f64> {
        Ok((4.0 * self.interaction_constant(C0_SAMPLES)?).max(1.0))
    }

    /// Resolve every jump of `u` into wave strengths.
    pub fn strength_profile(&self, u: &PcFn) -> Result<StrengthProfile> {
        u.jumps()
            .map(|(x, l, r)| Ok((x, self.riemann_strengths(&l, &r, None)?)))
            .collect()
    }

    /// `V`, `Q`, `Υ` from a strength profile, in `O(J·n²)`.
    ///
    /// A pair at `x < y` with families `i` (at `x`) and `j` (at `y`) approaches
    /// if `i > j`, or `i = j` is genuinely nonlinear and one strength is negative.
    pub fn glimm_from_profile(&self, profile: &[(f64, State)]) -> Glimm {
        let n = self.dim();
        let mut total = [0.0f64; MAX_DIM];
        let mut pos = [0.0f64; MAX_DIM];
        let mut neg = [0.0f64; MAX_DIM];
        let mut v = 0.0;
        let mut q = 0.0;
        let mut k = 0;
        while k < profile.len() {
            // jumps at the same position are one interface
            let x = profile[k].0;
            let mut end = k;
            while end < profile.len() && profile[end].0 == x {
                end += 1;
            }
            let mut here = [0.0f64; MAX_DIM];
            for (_, s) in &profile[k..end] {
                for j in 0..n {
                    here[j] += s[j];
                }
            }
            for j in 0..n {
                let s = here[j];
                let a = s.abs();
                v += a;
                let faster: f64 = total[j + 1..n].iter().sum();
                q += a * faster;
                if self.field_kind(j) == FieldKind::GenuinelyNonlinear {
                    q += if s < 0.0 {
                        a * (pos[j] + neg[j])
                    } else {
                        a * neg[j]
                    };
                }
            }
            for j in 0..n {
                total[j] += here[j].abs();
                if here[j] >= 0.0 {
                    pos[j] += here[j];
                } else {
                    neg[j] -= here[j];
                }
            }
            k = end;
        }
        Glimm {
            v,
            q,
            upsilon: v + self.c0 * q,
        }
    }

    /// `V`, `Q` and `Υ` of a piecewise-constant state.
    pub fn glimm_functionals(&self, u: &PcFn) -> Result<Glimm> {
        Ok(self.glimm_from_profile(&self.strength_profile(u)?))
    }
}

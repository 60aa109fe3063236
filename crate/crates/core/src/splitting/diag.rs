use alloc::vec::Vec;

use super::{evolve, RunTrace, SplitSchedule};
use crate::error::{Error, Result};
use crate::fronttrack::{track, FrontState, TrackOpts};
use crate::math::{exp, powf};
use crate::models::Model;
use crate::parallel::Executor;
use crate::pcfn::PcFn;
use crate::source::{apply_g, euler_step};
use crate::stats::loglog_slope;

/// One row of a convergence table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvRow {
    pub s: f64,
    pub t: f64,
    /// `‖F^s_t u − F^{s/2}_t u‖` (next finer step).
    pub distance: f64,
    /// Fitted log-log slope of distance against `s` (same on every row).
    pub slope: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Result of a sequence of runs with decreasing `s`.
#[derive(Debug, Clone)]
pub struct LimitRun {
    /// `(s, F^s_t u)` in the order given; the last one is the `F_t` surrogate.
    pub runs: Vec<(f64, PcFn)>,
    pub rows: Vec<ConvRow>,
    pub slope: Option<f64>,
    /// Consecutive distances decrease within the slack.
    pub monotone: bool,
    /// `sup ‖F^s_t u − F^{s'}_t u‖ / ((1 + ‖u‖)t²)` over all pairs.
    pub max_ratio_t2: f64,
}

impl LimitRun {
    pub fn surrogate(&self) -> &PcFn {
        &self.runs.last().expect("at least one run").1
    }

    /// Distance between the two finest runs, the error bar of the surrogate.
    pub fn error_bar(&self) -> f64 {
        self.rows.last().map_or(f64::NAN, |r| r.distance)
    }
}

/// Relative slack allowed in the monotonicity of successive distances.
pub const MONOTONE_SLACK: f64 = 0.05;

/// `base·2^{-k}`, `k = 0..count`.
pub fn dyadic(base: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| base * powf(2.0, -(k as f64))).collect()
}

/// Run `F^s_t u` for every `s` and tabulate successive distances. With
/// `bound_constant = Some(C)` each row is scored against `C(1 + ‖u‖)t²`.
#[allow(clippy::too_many_arguments)]
pub fn limit_run<E: Executor>(
    exec: &E,
    model: &Model,
    u0: &PcFn,
    t: f64,
    s_seq: &[f64],
    n: usize,
    eps: f64,
    bound_constant: Option<f64>,
) -> Result<LimitRun> {
    if s_seq.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidParameter(alloc::format!(
            "step sequence must decrease: {s_seq:?}"
        )));
    }
    let outs = exec.map(s_seq.to_vec(), |s| {
        evolve(model, u0, &SplitSchedule::new(s, t, n, eps))
    });
    let runs: Vec<(f64, PcFn)> = s_seq
        .iter()
        .copied()
        .zip(outs)
        .map(|(s, r)| r.map(|u| (s, u)))
        .collect::<Result<_>>()?;
    let dist: Vec<f64> = runs
        .windows(2)
        .map(|w| w[0].1.l1_dist(&w[1].1))
        .collect::<Result<_>>()?;
    let slope = loglog_slope(&s_seq[..dist.len()], &dist, true);
    let scale = (1.0 + u0.l1_norm()) * t * t;
    let mut max_ratio_t2: f64 = 0.0;
    for i in 0..runs.len() {
        for j in i + 1..runs.len() {
            max_ratio_t2 = max_ratio_t2.max(runs[i].1.l1_dist(&runs[j].1)? / scale);
        }
    }
    let bound = bound_constant.map_or(f64::NAN, |c| c * scale);
    let mut monotone = true;
    let rows = dist
        .iter()
        .enumerate()
        .map(|(k, &d)| {
            let mono = k == 0 || d <= dist[k - 1] * (1.0 + MONOTONE_SLACK);
            monotone &= mono;
            ConvRow {
                s: s_seq[k],
                t,
                distance: d,
                slope: slope.unwrap_or(f64::NAN),
                bound,
                pass: mono && !(d > bound),
            }
        })
        .collect();
    Ok(LimitRun {
        runs,
        rows,
        slope,
        monotone,
        max_ratio_t2,
    })
}

/// A defect measured at several times, with its fitted order.
#[derive(Debug, Clone, PartialEq)]
pub struct DefectTable {
    /// `(t, defect)`.
    pub rows: Vec<(f64, f64)>,
    pub slope: Option<f64>,
}

impl DefectTable {
    fn from_rows(rows: Vec<(f64, f64)>) -> Self {
        let (ts, ds): (Vec<f64>, Vec<f64>) = rows.iter().copied().unzip();
        let slope = loglog_slope(&ts, &ds, true);
        DefectTable { rows, slope }
    }
}

/// `‖S_t P_t u − P_t S_t u‖` for each `t`.
pub fn commutation_defect<E: Executor>(
    exec: &E,
    model: &Model,
    u: &PcFn,
    t_list: &[f64],
    n: usize,
    eps: f64,
) -> Result<DefectTable> {
    let opts = TrackOpts::new(eps);
    let src = model.source.as_ref();
    let out = exec.map(t_list.to_vec(), |t| -> Result<(f64, f64)> {
        let sp = track(&model.system, &euler_step(src, u, t, n)?, t, opts)?;
        let ps = euler_step(src, &track(&model.system, u, t, opts)?, t, n)?;
        Ok((t, sp.l1_dist(&ps)?))
    });
    Ok(DefectTable::from_rows(
        out.into_iter().collect::<Result<_>>()?,
    ))
}

/// Tangent quotients at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentRow {
    pub t: f64,
    /// `‖F_t u − S_t u − t·G(u)‖ / t`.
    pub quotient: f64,
    /// `‖F_t u − P_t S_t u‖ / t`.
    pub quotient_ps: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TangentTable {
    pub rows: Vec<TangentRow>,
    pub slope: Option<f64>,
    pub slope_ps: Option<f64>,
}

/// Tangent quotients with `F_t` approximated by `F^s_t`, `s = t/2^refine`.
/// `G` is the piecewise-constant source `Π_N∘G` the scheme uses.
pub fn tangent_defect<E: Executor>(
    exec: &E,
    model: &Model,
    u: &PcFn,
    t_list: &[f64],
    n: usize,
    eps: f64,
    refine: u32,
) -> Result<TangentTable> {
    let opts = TrackOpts::new(eps);
    let src = model.source.as_ref();
    let g = apply_g(src, u, n)?;
    let out = exec.map(t_list.to_vec(), |t| -> Result<TangentRow> {
        let s = t / (1u64 << refine) as f64;
        let f = evolve(model, u, &SplitSchedule::new(s, t, n, eps))?;
        let st = track(&model.system, u, t, opts)?;
        let lin = st.lincomb(1.0, &g, t)?;
        let ps = euler_step(src, &st, t, n)?;
        Ok(TangentRow {
            t,
            quotient: f.l1_dist(&lin)? / t,
            quotient_ps: f.l1_dist(&ps)? / t,
        })
    });
    let rows: Vec<TangentRow> = out.into_iter().collect::<Result<_>>()?;
    let ts: Vec<f64> = rows.iter().map(|r| r.t).collect();
    let q: Vec<f64> = rows.iter().map(|r| r.quotient).collect();
    let qps: Vec<f64> = rows.iter().map(|r| r.quotient_ps).collect();
    Ok(TangentTable {
        slope: loglog_slope(&ts, &q, true),
        slope_ps: loglog_slope(&ts, &qps, true),
        rows,
    })
}

/// Comparison of two models on the same datum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensitivityReport {
    pub t: f64,
    /// `‖F¹_t u − F²_t u‖`.
    pub distance: f64,
    /// Sampled `‖Df₁ − Df₂‖_{C⁰(Ω)}`.
    pub df_dist: f64,
    /// `max ‖G₁(v) − G₂(v)‖_{L¹}` over `v` on the second trajectory.
    pub g_dist: f64,
    /// `distance / ((df_dist + g_dist)·t)`, the measured Lipschitz factor.
    pub ratio: f64,
}

pub fn sensitivity(
    m1: &Model,
    m2: &Model,
    u0: &PcFn,
    sched: &SplitSchedule,
) -> Result<SensitivityReport> {
    if m1.system.dim() != m2.system.dim() {
        return Err(Error::DimensionMismatch {
            expected: m1.system.dim(),
            got: m2.system.dim(),
        });
    }
    let a = evolve(m1, u0, sched)?;
    let (b, _) = super::run(m2, u0, sched)?;
    let distance = a.l1_dist(&b)?;
    let df_dist = m1.system.jacobian_distance(&m2.system, 256);
    let mut g_dist: f64 = 0.0;
    for v in [u0, &b] {
        let d = m1.source.apply(v)?.sub(&m2.source.apply(v)?)?.l1_norm();
        g_dist = g_dist.max(d);
    }
    let denom = (df_dist + g_dist) * sched.t_final;
    let ratio = if denom > 0.0 {
        distance / denom
    } else if distance == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(SensitivityReport {
        t: sched.t_final,
        distance,
        df_dist,
        g_dist,
        ratio,
    })
}

/// `‖F^s_t u − F^s_t w‖ / ‖u − w‖`.
pub fn lipschitz_ratio(model: &Model, u: &PcFn, w: &PcFn, sched: &SplitSchedule) -> Result<f64> {
    let d0 = u.l1_dist(w)?;
    if d0 == 0.0 {
        return Ok(0.0);
    }
    Ok(evolve(model, u, sched)?.l1_dist(&evolve(model, w, sched)?)? / d0)
}

/// `‖F^s_t u − F^s_r u‖ / |t − r|`, with `s`, `N`, `ε` from `sched`.
pub fn time_modulus(model: &Model, u: &PcFn, t: f64, r: f64, sched: &SplitSchedule) -> Result<f64> {
    if t == r {
        return Ok(0.0);
    }
    let a = evolve(
        model,
        u,
        &SplitSchedule {
            t_final: t,
            ..*sched
        },
    )?;
    let b = evolve(
        model,
        u,
        &SplitSchedule {
            t_final: r,
            ..*sched
        },
    )?;
    Ok(a.l1_dist(&b)? / (t - r).abs())
}

/// `‖F^s_{t₁} F^s_{t₂} u − F^s_{t₁+t₂} u‖`.
pub fn semigroup_defect(
    model: &Model,
    u: &PcFn,
    t1: f64,
    t2: f64,
    sched: &SplitSchedule,
) -> Result<f64> {
    let inner = evolve(
        model,
        u,
        &SplitSchedule {
            t_final: t2,
            ..*sched
        },
    )?;
    let twice = evolve(
        model,
        &inner,
        &SplitSchedule {
            t_final: t1,
            ..*sched
        },
    )?;
    let once = evolve(
        model,
        u,
        &SplitSchedule {
            t_final: t1 + t2,
            ..*sched
        },
    )?;
    twice.l1_dist(&once)
}

/// `L^{t/s}·e^{L₁t}`: the Lipschitz bound obtained by composing step bounds.
pub fn naive_lipschitz_bound(l: f64, l1: f64, t: f64, s: f64) -> f64 {
    powf(l, t / s) * exp(l1 * t)
}

/// Domain growth constant from a warm-up sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    /// `max (Υ(P_s u) − Υ(u)) / (s·(L₃ + V(u)))` over the probes.
    pub measured: f64,
    /// `2·measured`.
    pub c: f64,
}

pub fn calibrate_domain_constant(
    model: &Model,
    probes: &[PcFn],
    s: f64,
    n: usize,
    eps: f64,
) -> Result<Calibration> {
    let opts = TrackOpts::new(eps);
    let l3 = model.source.constants().l3;
    let mut measured: f64 = 0.0;
    for u in probes {
        let g0 = FrontState::init(&model.system, u, opts)?.functionals();
        let p = euler_step(model.source.as_ref(), u, s, n)?;
        let g1 = FrontState::init(&model.system, &p, opts)?.functionals();
        let denom = s * (l3 + g0.v);
        if denom > 0.0 {
            measured = measured.max((g1.upsilon - g0.upsilon) / denom);
        }
    }
    Ok(Calibration {
        measured,
        c: 2.0 * measured,
    })
}

/// `max (Υ after P_s − Υ before) / (s·(L₃ + V before))` along a trace.
pub fn source_step_growth(trace: &RunTrace, l3: f64) -> f64 {
    let s = trace.schedule.s;
    trace
        .rows
        .iter()
        .filter(|r| r.upsilon_before_source.is_finite())
        .map(|r| {
            let denom = s * (l3 + r.v_before_source);
            if denom > 0.0 {
                (r.upsilon - r.upsilon_before_source) / denom
            } else {
                0.0
            }
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

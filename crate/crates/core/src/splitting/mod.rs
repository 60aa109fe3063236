//! The fractional-step operator `F^s_t = S_{t−hs}∘(P_s∘S_s)^h` and its
//! diagnostics.

mod diag;

pub use diag::*;

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fronttrack::{FrontState, TrackOpts};
use crate::math::floor;
use crate::models::Model;
use crate::pcfn::PcFn;
use crate::source::euler_step;
use crate::system::Glimm;

/// Domains `D_t = D̄_{δ+Ct}` for `t ≤ T`: states with `Υ < δ + C·t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainSpec {
    pub delta: f64,
    pub c: f64,
    pub horizon: f64,
}

impl DomainSpec {
    pub fn bound(&self, t: f64) -> f64 {
        self.delta + self.c * t
    }
}

/// Parameters of one fractional-step run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSchedule {
    pub s: f64,
    pub t_final: f64,
    /// Projection resolution of `Π_N`.
    pub n: usize,
    /// Front-tracking accuracy.
    pub eps: f64,
    /// Admission checks; `None` skips them.
    pub domain: Option<DomainSpec>,
}

impl SplitSchedule {
    pub fn new(s: f64, t_final: f64, n: usize, eps: f64) -> Self {
        SplitSchedule {
            s,
            t_final,
            n,
            eps,
            domain: None,
        }
    }

    pub fn with_domain(mut self, d: DomainSpec) -> Self {
        self.domain = Some(d);
        self
    }

    /// Number of full source steps `h = ⌊t/s⌋`.
    pub fn steps(&self) -> usize {
        floor(self.t_final / self.s * (1.0 + 1e-12)) as usize
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.s > 0.0 && self.t_final >= 0.0 && self.eps > 0.0 && self.n >= 1) {
            return Err(Error::InvalidParameter(alloc::format!(
                "invalid schedule {self:?}"
            )));
        }
        if let Some(d) = self.domain {
            if self.t_final > d.horizon {
                return Err(Error::HorizonExceeded {
                    t: self.t_final,
                    t_max: d.horizon,
                });
            }
        }
        Ok(())
    }
}

/// Diagnostics of the state at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub v: f64,
    pub q: f64,
    pub upsilon: f64,
    /// `Υ` just before the source step that produced this state (NaN if none).
    pub upsilon_before_source: f64,
    /// `V` just before that source step (NaN if none).
    pub v_before_source: f64,
    pub tv: f64,
    pub l1: f64,
    pub fronts: usize,
    /// Admission bound `δ + C·t`, NaN without a domain.
    pub bound: f64,
}

/// Time series of one run.
#[derive(Debug, Clone)]
pub struct RunTrace {
    pub model: String,
    pub source: String,
    pub schedule: SplitSchedule,
    pub approximate: bool,
    pub rows: Vec<TraceRow>,
}

/// `F^s_t u₀` with its trace.
pub fn run(model: &Model, u0: &PcFn, sched: &SplitSchedule) -> Result<(PcFn, RunTrace)> {
    sched.validate()?;
    let opts = TrackOpts::new(sched.eps);
    let h = sched.steps();
    let rem = (sched.t_final - h as f64 * sched.s).max(0.0);
    let mut trace = RunTrace {
        model: model.id.clone(),
        source: String::from(model.source.name()),
        schedule: *sched,
        approximate: model.source.is_approximate(),
        rows: Vec::with_capacity(h + 2),
    };
    let mut u = u0.clone();
    let mut before = (f64::NAN, f64::NAN);
    for k in 0..=h {
        let t = k as f64 * sched.s;
        let mut st = FrontState::init(&model.system, &u, opts)?;
        record(
            &mut trace,
            sched,
            t,
            &st.functionals(),
            before,
            &u,
            st.len(),
        )?;
        let dt = if k < h { sched.s } else { rem };
        if dt == 0.0 {
            break;
        }
        st.evolve(dt)?;
        if k == h {
            u = st.snapshot();
            record(
                &mut trace,
                sched,
                sched.t_final,
                &st.functionals(),
                (f64::NAN, f64::NAN),
                &u,
                st.len(),
            )?;
            break;
        }
        let g = st.functionals();
        before = (g.upsilon, g.v);
        u = euler_step(model.source.as_ref(), &st.snapshot(), sched.s, sched.n)?;
    }
    Ok((u, trace))
}

fn record(
    trace: &mut RunTrace,
    sched: &SplitSchedule,
    t: f64,
    g: &Glimm,
    before: (f64, f64),
    u: &PcFn,
    fronts: usize,
) -> Result<()> {
    let bound = sched.domain.map_or(f64::NAN, |d| d.bound(t));
    if bound.is_finite() && !(g.upsilon < bound) {
        return Err(Error::DomainAdmission {
            upsilon: g.upsilon,
            bound,
            time: t,
        });
    }
    trace.rows.push(TraceRow {
        t,
        v: g.v,
        q: g.q,
        upsilon: g.upsilon,
        upsilon_before_source: before.0,
        v_before_source: before.1,
        tv: u.tv(),
        l1: u.l1_norm(),
        fronts,
        bound,
    });
    Ok(())
}

/// `F^s_t u₀` without the trace.
pub fn evolve(model: &Model, u0: &PcFn, sched: &SplitSchedule) -> Result<PcFn> {
    run(model, u0, sched).map(|r| r.0)
}

#[cfg(test)]
mod tests;

//! Wave-front tracking for the homogeneous system.
//!
//! Fronts live in an arena threaded as a doubly linked list ordered by
//! position. Pairwise collision times sit in a min-heap; entries carry slot
//! versions and are dropped lazily when either front has since been removed.

mod exact;

pub use exact::ScalarExact;

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::math::round;
use crate::pcfn::PcFn;
use crate::state::{State, MAX_DIM};
use crate::system::{FieldKind, Glimm, SystemModel, WaveKind};

/// Kind of a tracked front.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrontKind {
    Shock,
    Contact,
    RarefactionPiece,
    /// Travels at exactly `λ̂` and carries the error of the simplified solver.
    NonPhysical,
}

/// A straight discontinuity `x(t) = x0 + speed·(t − t0)`.
#[derive(Debug, Clone, Copy)]
pub struct WaveFront {
    pub x0: f64,
    pub t0: f64,
    pub speed: f64,
    /// Characteristic family; `n` for non-physical fronts.
    pub family: usize,
    /// Signed strength; `‖right − left‖` for non-physical fronts.
    pub sigma: f64,
    pub kind: FrontKind,
    pub left: State,
    pub right: State,
}

impl WaveFront {
    #[inline]
    pub fn position(&self, t: f64) -> f64 {
        self.x0 + self.speed * (t - self.t0)
    }
}

/// Front-tracking parameters.
///
/// A rarefaction of strength `σ` is split into `max(1, round(σ/ε))` equal
/// pieces, so pieces never exceed `1.5ε`; re-resolving a piece that grew by
/// roundoff or a small source increment does not split it again.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackOpts {
    /// Largest rarefaction piece.
    pub eps: f64,
    /// Collisions with `|σσ'|` below this use the simplified solver
    /// (systems only). Defaults to `ε²`.
    pub threshold: Option<f64>,
    pub max_events: usize,
    /// Refuse states whose `Υ` exceeds this bound.
    pub upsilon_bound: Option<f64>,
    pub log_events: bool,
    /// Keep every removed front with its removal time.
    pub log_segments: bool,
}

impl TrackOpts {
    pub fn new(eps: f64) -> Self {
        TrackOpts {
            eps,
            threshold: None,
            max_events: 5_000_000,
            upsilon_bound: None,
            log_events: false,
            log_segments: false,
        }
    }

    fn threshold(&self) -> f64 {
        self.threshold.unwrap_or(self.eps * self.eps)
    }
}

/// Which Riemann solver resolved a collision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solver {
    Accurate,
    Simplified,
}

/// One logged collision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionRecord {
    pub t: f64,
    pub x: f64,
    pub families: (usize, usize),
    pub strengths: (f64, f64),
    pub solver: Solver,
}

const NIL: u32 = u32::MAX;

/// Strengths at or below this are roundoff from the strength solver.
const TINY: f64 = 1e-12;

#[derive(Debug, Clone)]
struct Slot {
    front: WaveFront,
    prev: u32,
    next: u32,
    version: u32,
    alive: bool,
}

#[derive(Debug, Clone, Copy)]
struct Pending {
    t: f64,
    x: f64,
    a: u32,
    b: u32,
    va: u32,
    vb: u32,
}

impl PartialEq for Pending {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Pending {}
impl PartialOrd for Pending {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Pending {
    // reversed: earliest time first, ties left to right
    fn cmp(&self, o: &Self) -> Ordering {
        o.t.total_cmp(&self.t)
            .then(o.x.total_cmp(&self.x))
            .then(o.a.cmp(&self.a))
    }
}

/// Evolving front configuration.
#[derive(Clone)]
pub struct FrontState {
    model: SystemModel,
    opts: TrackOpts,
    slots: Vec<Slot>,
    free: Vec<u32>,
    head: u32,
    heap: BinaryHeap<Pending>,
    time: f64,
    events: usize,
    log: Vec<CollisionRecord>,
    segments: Vec<(WaveFront, f64)>,
}

impl core::fmt::Debug for FrontState {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("FrontState")
            .field("time", &self.time)
            .field("fronts", &self.len())
            .field("events", &self.events)
            .finish()
    }
}

/// A front under construction: `(kind, family, σ, left, right, speed)`.
type Proto = (FrontKind, usize, f64, State, State, f64);

impl FrontState {
    /// Replace each jump of `u` by its Riemann fan, rarefactions split into
    /// pieces of strength at most `ε`.
    pub fn init(model: &SystemModel, u: &PcFn, opts: TrackOpts) -> Result<Self> {
        if u.dim() != model.dim() {
            return Err(Error::DimensionMismatch {
                expected: model.dim(),
                got: u.dim(),
            });
        }
        if !(opts.eps > 0.0) {
            return Err(Error::InvalidParameter(alloc::format!(
                "eps must be positive, got {}",
                opts.eps
            )));
        }
        let mut st = FrontState {
            model: model.clone(),
            opts,
            slots: Vec::new(),
            free: Vec::new(),
            head: NIL,
            heap: BinaryHeap::new(),
            time: 0.0,
            events: 0,
            log: Vec::new(),
            segments: Vec::new(),
        };
        let mut protos = Vec::new();
        let mut xs = Vec::new();
        for (x, l, r) in u.jumps() {
            for v in [&l, &r] {
                if !model.in_omega(v) || !model.system().admissible(v) {
                    return Err(Error::OutsideDomain);
                }
            }
            let before = protos.len();
            st.accurate(&l, &r, None, &mut protos)?;
            xs.resize(protos.len(), x);
            debug_assert!(xs.len() >= before);
        }
        let mut prev = NIL;
        for (p, x) in protos.into_iter().zip(xs) {
            let id = st.alloc(p, x, 0.0);
            st.link_after(prev, id);
            prev = id;
        }
        let mut a = st.head;
        while a != NIL {
            let b = st.slots[a as usize].next;
            if b != NIL {
                st.schedule(a, b, 0.0);
            }
            a = b;
        }
        st.check_upsilon()?;
        Ok(st)
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn opts(&self) -> &TrackOpts {
        &self.opts
    }

    pub fn model(&self) -> &SystemModel {
        &self.model
    }

    /// Number of collisions processed so far.
    pub fn events(&self) -> usize {
        self.events
    }

    pub fn collision_log(&self) -> &[CollisionRecord] {
        &self.log
    }

    /// Every front that existed so far with the time it ended (the current
    /// time for live fronts). Removed fronts are kept only with `log_segments`.
    pub fn segments(&self) -> Vec<(WaveFront, f64)> {
        let mut out = self.segments.clone();
        out.extend(self.fronts().map(|f| (*f, self.time)));
        out
    }

    /// Number of live fronts.
    pub fn len(&self) -> usize {
        self.slots.len() - self.free.len()
    }

    pub fn is_empty(&self) -> bool {
        self.head == NIL
    }

    /// Live fronts in position order.
    pub fn fronts(&self) -> impl Iterator<Item = &WaveFront> + '_ {
        let mut a = self.head;
        core::iter::from_fn(move || {
            if a == NIL {
                return None;
            }
            let s = &self.slots[a as usize];
            a = s.next;
            Some(&s.front)
        })
    }

    /// Advance by `dt`, resolving every collision up to the new time.
    pub fn evolve(&mut self, dt: f64) -> Result<()> {
        if !(dt >= 0.0) {
            return Err(Error::InvalidParameter(alloc::format!(
                "negative duration {dt}"
            )));
        }
        let target = self.time + dt;
        while let Some(ev) = self.heap.peek().copied() {
            if ev.t > target {
                break;
            }
            self.heap.pop();
            if !self.valid(&ev) {
                continue;
            }
            self.events += 1;
            if self.events > self.opts.max_events {
                return Err(Error::TooManyEvents(self.opts.max_events));
            }
            self.time = ev.t.max(self.time);
            self.collide(ev)?;
        }
        self.time = target;
        self.check_upsilon()
    }

    /// The piecewise-constant profile at the current time.
    pub fn snapshot(&self) -> PcFn {
        let n = self.model.dim();
        let mut breaks = Vec::with_capacity(self.len());
        let mut values = Vec::with_capacity(self.len() + 1);
        values.push(State::zeros(n));
        let mut last = f64::NEG_INFINITY;
        for f in self.fronts() {
            // rounding may leave colliding fronts a hair out of order
            let x = f.position(self.time).max(last);
            breaks.push(x);
            values.push(f.right);
            last = x;
        }
        if let Some(v) = values.last_mut() {
            *v = State::zeros(n);
        }
        PcFn::from_raw(n, breaks, values)
    }

    /// `V`, `Q`, `Υ` of the front configuration; non-physical fronts count as
    /// an extra, fastest linearly degenerate family.
    pub fn functionals(&self) -> Glimm {
        let entries: Vec<(f64, usize, f64)> = self
            .fronts()
            .map(|f| (f.position(self.time), f.family, f.sigma))
            .collect();
        front_functionals(&self.model, &entries)
    }

    fn check_upsilon(&self) -> Result<()> {
        if let Some(bound) = self.opts.upsilon_bound {
            let g = self.functionals();
            if !(g.upsilon < bound) {
                return Err(Error::DomainAdmission {
                    upsilon: g.upsilon,
                    bound,
                    time: self.time,
                });
            }
        }
        Ok(())
    }

    fn valid(&self, ev: &Pending) -> bool {
        let (a, b) = (&self.slots[ev.a as usize], &self.slots[ev.b as usize]);
        a.alive && b.alive && a.version == ev.va && b.version == ev.vb && a.next == ev.b
    }

    fn alloc(&mut self, p: Proto, x: f64, t: f64) -> u32 {
        let front = WaveFront {
            x0: x,
            t0: t,
            speed: p.5,
            family: p.1,
            sigma: p.2,
            kind: p.0,
            left: p.3,
            right: p.4,
        };
        match self.free.pop() {
            Some(id) => {
                let s = &mut self.slots[id as usize];
                s.front = front;
                s.prev = NIL;
                s.next = NIL;
                s.version = s.version.wrapping_add(1);
                s.alive = true;
                id
            }
            None => {
                self.slots.push(Slot {
                    front,
                    prev: NIL,
                    next: NIL,
                    version: 0,
                    alive: true,
                });
                (self.slots.len() - 1) as u32
            }
        }
    }

    fn release(&mut self, id: u32) {
        let s = &mut self.slots[id as usize];
        s.alive = false;
        s.version = s.version.wrapping_add(1);
        self.free.push(id);
    }

    /// Insert `id` after `prev` (`NIL` means at the head).
    fn link_after(&mut self, prev: u32, id: u32) {
        let next = if prev == NIL {
            self.head
        } else {
            self.slots[prev as usize].next
        };
        self.slots[id as usize].prev = prev;
        self.slots[id as usize].next = next;
        if prev == NIL {
            self.head = id;
        } else {
            self.slots[prev as usize].next = id;
        }
        if next != NIL {
            self.slots[next as usize].prev = id;
        }
    }

    fn unlink(&mut self, id: u32) {
        let (prev, next) = (self.slots[id as usize].prev, self.slots[id as usize].next);
        if prev == NIL {
            self.head = next;
        } else {
            self.slots[prev as usize].next = next;
        }
        if next != NIL {
            self.slots[next as usize].prev = prev;
        }
        self.release(id);
    }

    fn schedule(&mut self, a: u32, b: u32, now: f64) {
        let (fa, fb) = (&self.slots[a as usize].front, &self.slots[b as usize].front);
        if !(fa.speed > fb.speed) {
            return;
        }
        let (xa, xb) = (fa.position(now), fb.position(now));
        let d = (xb - xa).max(0.0);
        let dt = d / (fa.speed - fb.speed);
        let t = now + dt;
        let x = if d == 0.0 {
            xa
        } else {
            0.5 * (xa + fa.speed * dt + xb + fb.speed * dt)
        };
        let (va, vb) = (
            self.slots[a as usize].version,
            self.slots[b as usize].version,
        );
        self.heap.push(Pending { t, x, a, b, va, vb });
    }

    fn collide(&mut self, ev: Pending) -> Result<()> {
        let fa = self.slots[ev.a as usize].front;
        let fb = self.slots[ev.b as usize].front;
        let n = self.model.dim();
        let physical = fa.kind != FrontKind::NonPhysical && fb.kind != FrontKind::NonPhysical;
        let small = (fa.sigma * fb.sigma).abs() < self.opts.threshold();
        let solver = if n > 1 && (!physical || small) && fa.family >= fb.family {
            Solver::Simplified
        } else {
            Solver::Accurate
        };
        let mut protos = Vec::new();
        match solver {
            Solver::Accurate => {
                let mut guess = State::zeros(n);
                for f in [&fa, &fb] {
                    if f.family < n {
                        guess[f.family] += f.sigma;
                    }
                }
                self.accurate(&fa.left, &fb.right, Some(&guess), &mut protos)?;
            }
            Solver::Simplified => self.simplified(&fa, &fb, &mut protos)?,
        }
        for p in &protos {
            if !self.model.in_omega(&p.4) || !self.model.system().admissible(&p.4) {
                return Err(Error::OutsideDomain);
            }
        }
        if self.opts.log_events {
            self.log.push(CollisionRecord {
                t: ev.t,
                x: ev.x,
                families: (fa.family, fb.family),
                strengths: (fa.sigma, fb.sigma),
                solver,
            });
        }
        if self.opts.log_segments {
            self.segments.push((fa, ev.t));
            self.segments.push((fb, ev.t));
        }
        let prev = self.slots[ev.a as usize].prev;
        let next = self.slots[ev.b as usize].next;
        self.unlink(ev.a);
        self.unlink(ev.b);
        let mut last = prev;
        for p in protos {
            let id = self.alloc(p, ev.x, ev.t);
            self.link_after(last, id);
            last = id;
        }
        // reschedule every adjacent pair touching the new block
        let mut a = if prev == NIL { self.head } else { prev };
        if prev == NIL && a == NIL {
            return Ok(());
        }
        loop {
            let b = self.slots[a as usize].next;
            if b == NIL {
                break;
            }
            self.schedule(a, b, ev.t);
            if b == next {
                break;
            }
            a = b;
        }
        Ok(())
    }

    /// Exact Riemann fan with rarefactions split into equal pieces.
    fn accurate(
        &self,
        ul: &State,
        ur: &State,
        guess: Option<&State>,
        out: &mut Vec<Proto>,
    ) -> Result<()> {
        let m = &self.model;
        let fan = m.riemann_fan(ul, ur, guess)?;
        let start = out.len();
        let mut carry: Option<State> = None;
        let big = (0..fan.waves.len()).fold(0, |b, k| {
            if fan.waves[k].sigma.abs() > fan.waves[b].sigma.abs() {
                k
            } else {
                b
            }
        });
        for (k, mut w) in fan.waves.into_iter().enumerate() {
            // waves at roundoff level are absorbed into a neighbour
            if w.sigma.abs() <= TINY && k != big {
                carry.get_or_insert(w.left);
                continue;
            }
            if let Some(l) = carry.take() {
                w.left = l;
            }
            match w.kind {
                WaveKind::Shock => out.push((
                    FrontKind::Shock,
                    w.family,
                    w.sigma,
                    w.left,
                    w.right,
                    w.speed,
                )),
                WaveKind::Contact => out.push((
                    FrontKind::Contact,
                    w.family,
                    w.sigma,
                    w.left,
                    w.right,
                    w.speed,
                )),
                WaveKind::Rarefaction => {
                    let pieces = round(w.sigma / self.opts.eps).max(1.0) as usize;
                    let h = w.sigma / pieces as f64;
                    let mut l = w.left;
                    for p in 0..pieces {
                        let r = if p + 1 == pieces {
                            w.right
                        } else {
                            m.rarefaction_curve(w.family, h, &l)?
                        };
                        let speed = self.piece_speed(w.family, &l, &r)?;
                        out.push((FrontKind::RarefactionPiece, w.family, h, l, r, speed));
                        l = r;
                    }
                }
            }
        }
        if carry.is_some() && out.len() > start {
            out.last_mut().unwrap().4 = *ur;
        }
        Ok(())
    }

    fn piece_speed(&self, j: usize, l: &State, r: &State) -> Result<f64> {
        let m = &self.model;
        if m.dim() == 1 {
            m.rh_speed(l, r)
        } else {
            Ok(0.5 * (m.lambda(l, j)? + m.lambda(r, j)?))
        }
    }

    /// Incoming strengths pass through unchanged; the residual mismatch is
    /// carried by a non-physical front at `λ̂`.
    fn simplified(&self, fa: &WaveFront, fb: &WaveFront, out: &mut Vec<Proto>) -> Result<()> {
        let m = &self.model;
        let n = m.dim();
        let mut v = fa.left;
        let push_wave = |j: usize, sigma: f64, v: &mut State, out: &mut Vec<Proto>| -> Result<()> {
            let (w, speed, kind) = m.elementary(j, sigma, v, false)?;
            let (kind, speed) = match kind {
                WaveKind::Shock => (FrontKind::Shock, speed),
                WaveKind::Contact => (FrontKind::Contact, speed),
                WaveKind::Rarefaction => (
                    FrontKind::RarefactionPiece,
                    0.5 * (m.lambda(v, j)? + m.lambda(&w, j)?),
                ),
            };
            out.push((kind, j, sigma, *v, w, speed));
            *v = w;
            Ok(())
        };
        if fa.kind == FrontKind::NonPhysical {
            push_wave(fb.family, fb.sigma, &mut v, out)?;
        } else if fa.family == fb.family {
            let s = fa.sigma + fb.sigma;
            if s != 0.0 {
                push_wave(fa.family, s, &mut v, out)?;
            }
        } else {
            push_wave(fb.family, fb.sigma, &mut v, out)?;
            push_wave(fa.family, fa.sigma, &mut v, out)?;
        }
        let gap = (fb.right - v).norm();
        if gap > TINY || out.is_empty() {
            out.push((FrontKind::NonPhysical, n, gap, v, fb.right, m.lambda_hat()));
        } else if let Some(last) = out.last_mut() {
            last.4 = fb.right;
        }
        Ok(())
    }
}

/// `V`, `Q`, `Υ` from `(position, family, strength)` entries sorted by
/// position; family `n` is the non-physical one.
pub fn front_functionals(model: &SystemModel, entries: &[(f64, usize, f64)]) -> Glimm {
    let n = model.dim();
    let fams = n + 1;
    let mut total = [0.0f64; MAX_DIM + 1];
    let mut pos = [0.0f64; MAX_DIM + 1];
    let mut neg = [0.0f64; MAX_DIM + 1];
    let (mut v, mut q) = (0.0, 0.0);
    let mut k = 0;
    while k < entries.len() {
        let x = entries[k].0;
        let mut end = k;
        let mut here = [0.0f64; MAX_DIM + 1];
        while end < entries.len() && entries[end].0 == x {
            here[entries[end].1] += entries[end].2;
            end += 1;
        }
        for j in 0..fams {
            let s = here[j];
            let a = s.abs();
            v += a;
            let faster: f64 = total[j + 1..fams].iter().sum();
            q += a * faster;
            if j < n && model.field_kind(j) == FieldKind::GenuinelyNonlinear {
                q += if s < 0.0 {
                    a * (pos[j] + neg[j])
                } else {
                    a * neg[j]
                };
            }
        }
        for j in 0..fams {
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
        upsilon: v + model.c0 * q,
    }
}

/// `S_t u`: track fronts from `u` for time `t` and return the profile.
pub fn track(model: &SystemModel, u: &PcFn, t: f64, opts: TrackOpts) -> Result<PcFn> {
    let mut st = FrontState::init(model, u, opts)?;
    st.evolve(t)?;
    Ok(st.snapshot())
}

//! Executes a scenario and collects its artifacts.

use std::path::Path;

use fracstep_core::models::Model;
use fracstep_core::parallel::Executor;
use fracstep_core::source::{ode_horizon, OdeDomain};
use fracstep_core::splitting::{
    commutation_defect, dyadic, limit_run, run, sensitivity, tangent_defect, ConvRow, DomainSpec,
    SplitSchedule, MONOTONE_SLACK,
};
use fracstep_core::stats::loglog_slope;
use fracstep_core::verify::{
    check_characterization, entropy_residual, rescaling_check, EntropyPair, EulerEntropy, HatGrid,
    Kruzkov, LocalEvolution, LocalWindow,
};
use fracstep_core::{PcFn, State};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{Datum, Diagnostic, Scenario};
use crate::error::CliError;
use crate::formats::{
    check_csv, convergence_csv, pcfn_to_table, summary_json, trace_csv, Check, CheckRow, Constants,
    DiagnosticSummary, Summary, SCHEMA_VERSION,
};
use crate::registry::build_model;

/// Runs independent items on the current rayon pool, preserving order.
#[derive(Debug, Clone, Copy, Default)]
pub struct Rayon;

impl Executor for Rayon {
    fn map<T, R, F>(&self, items: Vec<T>, f: F) -> Vec<R>
    where
        T: Send,
        R: Send,
        F: Fn(T) -> R + Sync + Send,
    {
        items.into_par_iter().map(f).collect()
    }
}

/// Summary and artifact files of a finished scenario.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub summary: Summary,
    /// `(file name, contents)`, in write order; the summary comes last.
    pub files: Vec<(String, String)>,
}

pub fn build_datum(datum: &Datum, dim: usize, seed: u64) -> Result<PcFn, CliError> {
    let values = |v: &crate::config::Values| {
        v.to_vec(dim)
            .map(|c| State::from_slice(&c))
            .ok_or_else(|| CliError::Format(format!("datum values need {dim} components")))
    };
    let u = match datum {
        Datum::Riemann {
            left,
            right,
            at,
            width,
        } => {
            let (l, r) = (values(left)?, values(right)?);
            PcFn::new(
                dim,
                vec![at - width, *at, at + width],
                vec![State::zeros(dim), l, r, State::zeros(dim)],
            )?
        }
        Datum::Bump { a, b, value } => PcFn::indicator(*a, *b, values(value)?)?,
        Datum::Random {
            jumps,
            amplitude,
            half_width,
        } => {
            let amp = values(amplitude)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut breaks: Vec<f64> = (0..=*jumps)
                .map(|_| rng.gen_range(-half_width..*half_width))
                .collect();
            breaks.sort_by(f64::total_cmp);
            breaks.dedup();
            let mut vals = vec![State::zeros(dim)];
            for _ in 1..breaks.len() {
                let v: Vec<f64> = amp
                    .as_slice()
                    .iter()
                    .map(|a| a * rng.gen_range(-1.0..1.0))
                    .collect();
                vals.push(State::from_slice(&v));
            }
            vals.push(State::zeros(dim));
            PcFn::new(dim, breaks, vals)?
        }
        Datum::Steps { breaks, values: vs } => {
            if vs.len() + 1 != breaks.len() {
                return Err(CliError::Format(
                    "steps datum needs one value per interval".into(),
                ));
            }
            let mut vals = vec![State::zeros(dim)];
            for v in vs {
                vals.push(values(v)?);
            }
            vals.push(State::zeros(dim));
            PcFn::new(dim, breaks.clone(), vals)?
        }
    };
    Ok(u)
}

struct Ctx<'a> {
    sc: &'a Scenario,
    model: &'a Model,
    u0: &'a PcFn,
}

impl Ctx<'_> {
    fn schedule(&self) -> SplitSchedule {
        let s = &self.sc.schedule;
        let sched = SplitSchedule::new(s.step(), s.t, s.n, s.eps);
        match (s.delta, s.c) {
            (Some(delta), Some(c)) => sched.with_domain(DomainSpec {
                delta,
                c,
                horizon: s.t,
            }),
            _ => sched,
        }
    }
}

struct DiagOut {
    summary: DiagnosticSummary,
    files: Vec<(String, String)>,
}

fn check(name: impl Into<String>, value: f64, bound: String, pass: bool) -> Check {
    Check {
        name: name.into(),
        value,
        bound,
        pass,
    }
}

fn row(check: impl Into<String>, parameter: f64, value: f64, bound: f64, pass: bool) -> CheckRow {
    CheckRow {
        check: check.into(),
        parameter,
        value,
        bound,
        pass,
    }
}

fn slope_rows(
    ts: &[f64],
    values: &[f64],
    s_of_t: impl Fn(f64) -> f64,
    min_slope: f64,
) -> (Vec<ConvRow>, f64) {
    let slope = loglog_slope(ts, values, true).unwrap_or(f64::NAN);
    let rows = ts
        .iter()
        .zip(values)
        .map(|(&t, &d)| ConvRow {
            s: s_of_t(t),
            t,
            distance: d,
            slope,
            bound: min_slope,
            pass: slope >= min_slope,
        })
        .collect();
    (rows, slope)
}

fn run_diagnostic(
    ctx: &Ctx,
    index: usize,
    diag: &Diagnostic,
) -> Result<DiagOut, fracstep_core::Error> {
    let kind = diag.kind();
    let stem = format!("{index:02}_{kind}");
    let csv_name = format!("{stem}.csv");
    let (model, u0) = (ctx.model, ctx.u0);
    let sched = ctx.schedule();
    let t = sched.t_final;
    let mut files = Vec::new();
    let mut checks = Vec::new();
    let csv = match diag {
        Diagnostic::Trace {} => {
            let (u, trace) = run(model, u0, &sched)?;
            files.push((format!("{stem}_final.txt"), pcfn_to_table(&u)));
            if let Some(d) = sched.domain {
                let worst = trace
                    .rows
                    .iter()
                    .map(|r| r.upsilon - r.bound)
                    .fold(f64::NEG_INFINITY, f64::max);
                checks.push(check(
                    "upsilon_minus_bound",
                    worst,
                    format!("upsilon < {} + {}*t", d.delta, d.c),
                    worst < 0.0,
                ));
            }
            trace_csv(&trace.rows)
        }
        Diagnostic::Limit {
            levels,
            s0,
            constant,
        } => {
            let s_seq = dyadic(s0.unwrap_or(t * t / 2.0), *levels);
            let lr = limit_run(
                &Rayon,
                model,
                u0,
                t,
                &s_seq,
                sched.n,
                sched.eps,
                Some(*constant),
            )?;
            files.push((
                format!("{stem}_surrogate.txt"),
                pcfn_to_table(lr.surrogate()),
            ));
            checks.push(check(
                "monotone",
                f64::from(u8::from(lr.monotone)),
                format!("successive distances nonincreasing within {MONOTONE_SLACK}"),
                lr.monotone,
            ));
            checks.push(check(
                "sup_distance_over_t2",
                lr.max_ratio_t2,
                format!("sup ||F^s u - F^s' u|| / ((1 + ||u||) t^2) <= {constant}"),
                lr.max_ratio_t2 <= *constant,
            ));
            convergence_csv(&lr.rows)
        }
        Diagnostic::Commutation { t_list, min_slope } => {
            let table = commutation_defect(&Rayon, model, u0, t_list, sched.n, sched.eps)?;
            let (ts, ds): (Vec<f64>, Vec<f64>) = table.rows.iter().copied().unzip();
            let (rows, slope) = slope_rows(&ts, &ds, |t| t, *min_slope);
            checks.push(check(
                "slope",
                slope,
                format!("slope >= {min_slope}"),
                slope >= *min_slope,
            ));
            convergence_csv(&rows)
        }
        Diagnostic::Tangent {
            t_list,
            refine,
            min_slope,
        } => {
            let table = tangent_defect(&Rayon, model, u0, t_list, sched.n, sched.eps, *refine)?;
            let ts: Vec<f64> = table.rows.iter().map(|r| r.t).collect();
            let qs: Vec<f64> = table.rows.iter().map(|r| r.quotient).collect();
            let scale = f64::from(1u32 << refine);
            let (rows, slope) = slope_rows(&ts, &qs, |t| t / scale, *min_slope);
            checks.push(check(
                "slope",
                slope,
                format!("slope >= {min_slope}"),
                slope >= *min_slope,
            ));
            convergence_csv(&rows)
        }
        Diagnostic::Sensitivity {
            param,
            deltas,
            t_list,
            slope_tolerance,
        } => {
            let spec = &ctx.sc.model;
            let perturbed = |delta: f64| -> Result<Model, fracstep_core::Error> {
                let params = spec
                    .params
                    .perturbed(param, delta, default_param(param))
                    .ok_or_else(|| {
                        fracstep_core::Error::InvalidParameter(format!(
                            "unknown model parameter {param}"
                        ))
                    })?;
                let m = crate::config::ModelSpec {
                    params,
                    ..spec.clone()
                };
                build_model(&m).map_err(|e| fracstep_core::Error::InvalidParameter(e.to_string()))
            };
            let mut rows = Vec::new();
            let by_delta = Rayon.map(deltas.clone(), |d| {
                perturbed(d)
                    .and_then(|m| sensitivity(model, &m, u0, &sched))
                    .map(|r| (d, r))
            });
            let mut dist = Vec::new();
            for r in by_delta {
                let (d, rep) = r?;
                rows.push(row("distance", d, rep.distance, f64::NAN, true));
                rows.push(row("lipschitz_factor", d, rep.ratio, f64::NAN, true));
                dist.push(rep.distance);
            }
            let tol = *slope_tolerance;
            let sd = loglog_slope(deltas, &dist, false).unwrap_or(f64::NAN);
            let pass = (sd - 1.0).abs() <= tol;
            rows.push(row("slope_in_delta", t, sd, tol, pass));
            checks.push(check(
                "slope_in_delta",
                sd,
                format!("|slope - 1| <= {tol}"),
                pass,
            ));
            if !t_list.is_empty() {
                let mid = deltas[deltas.len() / 2];
                let m2 = perturbed(mid)?;
                let by_t = Rayon.map(t_list.clone(), |tt| {
                    let s = SplitSchedule {
                        s: tt / 8.0,
                        t_final: tt,
                        domain: None,
                        ..sched
                    };
                    sensitivity(model, &m2, u0, &s).map(|r| r.distance)
                });
                let dt: Vec<f64> = by_t.into_iter().collect::<Result<_, _>>()?;
                for (&tt, &d) in t_list.iter().zip(&dt) {
                    rows.push(row("distance_in_t", tt, d, f64::NAN, true));
                }
                let st = loglog_slope(t_list, &dt, false).unwrap_or(f64::NAN);
                let pass = (st - 1.0).abs() <= tol;
                rows.push(row("slope_in_t", mid, st, tol, pass));
                checks.push(check(
                    "slope_in_t",
                    st,
                    format!("|slope - 1| <= {tol}"),
                    pass,
                ));
            }
            check_csv(&rows)
        }
        Diagnostic::Characterization {
            xi,
            windows,
            thetas,
            refine,
            sharp_fraction,
            flat_constant,
        } => {
            let evo = LocalEvolution {
                n: sched.n,
                eps: sched.eps,
                refine: *refine,
            };
            let reports = Rayon.map(windows.clone(), |[a, b]| {
                check_characterization(
                    model,
                    u0,
                    &LocalWindow {
                        xi: *xi,
                        a,
                        b,
                        thetas: thetas.clone(),
                    },
                    evo,
                )
            });
            let mut rows = Vec::new();
            let mut worst_ratio: f64 = 0.0;
            let mut decay = f64::NAN;
            for (k, rep) in reports.into_iter().enumerate() {
                let rep = rep?;
                for r in &rep.rows {
                    if k == 0 {
                        rows.push(row("sharp", r.theta, r.sharp, f64::NAN, true));
                    }
                    rows.push(row(format!("flat_w{k}"), r.theta, r.flat, f64::NAN, true));
                }
                let pass = rep.flat_ratio <= *flat_constant;
                rows.push(row(
                    format!("flat_over_tv2_w{k}"),
                    rep.tv,
                    rep.flat_ratio,
                    *flat_constant,
                    pass,
                ));
                worst_ratio = worst_ratio.max(rep.flat_ratio);
                if k == 0 {
                    decay = rep.rows.last().map_or(f64::NAN, |l| l.sharp) / rep.rows[0].sharp;
                }
            }
            let theta_min = thetas.iter().copied().fold(f64::INFINITY, f64::min);
            let decay_pass = decay <= *sharp_fraction;
            rows.push(row(
                "sharp_decay",
                theta_min,
                decay,
                *sharp_fraction,
                decay_pass,
            ));
            checks.push(check(
                "sharp_decay",
                decay,
                format!("sharp quotient at smallest theta <= {sharp_fraction} * first"),
                decay_pass,
            ));
            checks.push(check(
                "flat_over_tv2",
                worst_ratio,
                format!("flat quotient / TV^2 <= {flat_constant} on every window"),
                worst_ratio <= *flat_constant,
            ));
            check_csv(&rows)
        }
        Diagnostic::Entropy {
            levels,
            refinements,
            hats,
            x_range,
            max_positive,
        } => {
            let grid = HatGrid::uniform(t, hats[0], x_range[0], x_range[1], hats[1]);
            let entropies: Vec<Box<dyn EntropyPair>> = match model.system.dim() {
                1 => levels
                    .iter()
                    .map(|&k| {
                        Kruzkov::new(&model.system, k).map(|e| Box::new(e) as Box<dyn EntropyPair>)
                    })
                    .collect::<Result<_, _>>()?,
                3 => vec![Box::new(EulerEntropy::new(ctx.sc.model.params.gas())?)],
                n => {
                    return Err(fracstep_core::Error::InvalidParameter(format!(
                        "no entropy family for {n} components"
                    )))
                }
            };
            let worst = Rayon.map(refinements.clone(), |[eps, s]| {
                let sc = SplitSchedule {
                    s,
                    eps,
                    domain: None,
                    ..sched
                };
                let mut w: f64 = 0.0;
                for e in &entropies {
                    w = w.max(entropy_residual(model, u0, &sc, e.as_ref(), &grid)?.max_positive);
                }
                Ok::<_, fracstep_core::Error>(w)
            });
            let mut rows = Vec::new();
            let mut values = Vec::new();
            for ([eps, _], w) in refinements.iter().zip(worst) {
                let w = w?;
                rows.push(row(
                    "positive_part",
                    *eps,
                    w,
                    *max_positive,
                    w <= *max_positive,
                ));
                values.push(w);
            }
            let peak = values.iter().copied().fold(0.0, f64::max);
            let decreasing = values.windows(2).all(|p| p[1] <= p[0]);
            checks.push(check(
                "positive_part",
                peak,
                format!("max positive part <= {max_positive}"),
                peak <= *max_positive,
            ));
            checks.push(check(
                "decreasing",
                f64::from(u8::from(decreasing)),
                "positive part nonincreasing under refinement".into(),
                decreasing,
            ));
            check_csv(&rows)
        }
        Diagnostic::Rescaling { lambdas, bound } => {
            let rs = rescaling_check(&model.system, u0, t, lambdas, sched.eps)?;
            let rows: Vec<CheckRow> = rs
                .iter()
                .map(|r| {
                    row(
                        "deviation",
                        r.lambda,
                        r.deviation,
                        *bound,
                        r.deviation <= *bound,
                    )
                })
                .collect();
            let worst = rs.iter().map(|r| r.deviation).fold(0.0, f64::max);
            checks.push(check(
                "deviation",
                worst,
                format!("deviation <= {bound}"),
                worst <= *bound,
            ));
            check_csv(&rows)
        }
    };
    files.insert(0, (csv_name.clone(), csv));
    let pass = checks.iter().all(|c| c.pass);
    Ok(DiagOut {
        summary: DiagnosticSummary {
            kind: kind.into(),
            csv: csv_name,
            pass,
            checks,
        },
        files,
    })
}

/// Default value of a perturbable parameter, used when the scenario leaves it unset.
fn default_param(name: &str) -> f64 {
    let r = fracstep_core::models::RosenauParams::default();
    let g = fracstep_core::models::RadiatingGasParams::default();
    match name {
        "a" => g.a,
        "b" => g.b,
        "mu" => r.mu,
        "lambda" => r.lambda,
        "m" => r.m,
        "s" => r.s,
        "eps" => r.eps,
        _ => f64::NAN,
    }
}

/// Runs every diagnostic of the scenario on a pool of `jobs` threads.
pub fn run_scenario(sc: &Scenario, jobs: usize) -> Result<Outcome, CliError> {
    let model = build_model(&sc.model)?;
    let u0 = build_datum(&sc.datum, model.system.dim(), sc.seed)?;
    let ctx = Ctx {
        sc,
        model: &model,
        u0: &u0,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Format(format!("thread pool: {e}")))?;
    let results: Vec<Result<DiagOut, CliError>> = pool.install(|| {
        sc.diagnostics
            .par_iter()
            .enumerate()
            .map(|(i, d)| {
                run_diagnostic(&ctx, i, d).map_err(|source| CliError::Diagnostic {
                    index: i,
                    kind: d.kind().into(),
                    source,
                })
            })
            .collect()
    });
    let mut files = Vec::new();
    let mut diagnostics = Vec::new();
    for r in results {
        let out = r?;
        files.extend(out.files);
        diagnostics.push(out.summary);
    }
    let c = model.source.constants();
    let summary = Summary {
        schema: SCHEMA_VERSION,
        scenario: sc.name.clone(),
        model: sc.model.id.clone(),
        seed: sc.seed,
        pass: diagnostics.iter().all(|d| d.pass),
        constants: Constants {
            dim: model.system.dim(),
            lambda_hat: model.system.lambda_hat(),
            l1: c.l1,
            l2: c.l2,
            l3: c.l3,
            c0: model.system.c0,
            ode_horizon: sc
                .schedule
                .delta
                .zip(sc.schedule.delta0)
                .map(|(delta, delta0)| ode_horizon(&c, &OdeDomain { delta0, delta })),
        },
        diagnostics,
    };
    files.push(("summary.json".into(), summary_json(&summary)));
    Ok(Outcome { summary, files })
}

/// Writes the artifacts into `dir`, one file at a time.
pub fn write_outcome(dir: &Path, outcome: &Outcome) -> Result<(), CliError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| CliError::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    for (name, contents) in &outcome.files {
        let path = dir.join(name);
        std::fs::write(&path, contents).map_err(io(&path))?;
    }
    Ok(())
}

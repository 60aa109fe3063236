use super::*;
use crate::fronttrack::track;
use crate::models;
use crate::parallel::Sequential;
use crate::state::State;

fn bump() -> PcFn {
    PcFn::scalar(&[-1.0, 1.0], &[0.5]).unwrap()
}

#[test]
fn zero_source_reduces_to_tracking() {
    let m = models::burgers().unwrap();
    let u = PcFn::scalar(&[-1.0, 0.0, 1.0], &[1.0, -0.5]).unwrap();
    let f = evolve(&m, &u, &SplitSchedule::new(0.1, 1.3, 8, 0.02)).unwrap();
    let s = track(&m.system, &u, 1.3, TrackOpts::new(0.02)).unwrap();
    assert!(f.l1_dist(&s).unwrap() < 1e-12);
}

#[test]
fn one_step_is_source_after_transport() {
    let m = models::scalar_rosenau().unwrap();
    let s = 0.1;
    let f = evolve(&m, &bump(), &SplitSchedule::new(s, s, 8, 0.01)).unwrap();
    let st = track(&m.system, &bump(), s, TrackOpts::new(0.01)).unwrap();
    let p = euler_step(m.source.as_ref(), &st, s, 8).unwrap();
    assert!(f.l1_dist(&p).unwrap() == 0.0);
}

#[test]
fn trace_times_increase_and_obey_growth_estimate() {
    let m = models::scalar_rosenau().unwrap();
    let (_, tr) = run(&m, &bump(), &SplitSchedule::new(0.05, 0.32, 8, 0.01)).unwrap();
    assert!(tr.rows.windows(2).all(|w| w[0].t < w[1].t));
    assert_eq!(tr.rows.last().unwrap().t, 0.32);
    let growth = source_step_growth(&tr, 0.0);
    assert!(growth.is_finite() && growth < 10.0, "{growth}");
}

#[test]
fn admission_failure_is_reported() {
    let m = models::scalar_rosenau().unwrap();
    let sched = SplitSchedule::new(0.05, 0.2, 8, 0.01).with_domain(DomainSpec {
        delta: 0.5,
        c: 0.0,
        horizon: 1.0,
    });
    match run(&m, &bump(), &sched) {
        Err(Error::DomainAdmission {
            upsilon,
            bound,
            time,
        }) => {
            assert_eq!(time, 0.0);
            assert_eq!(bound, 0.5);
            assert!(upsilon >= 1.0);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn zero_source_limit_runs_coincide() {
    let m = models::burgers().unwrap();
    let lr = limit_run(
        &Sequential,
        &m,
        &bump(),
        0.5,
        &dyadic(0.1, 3),
        8,
        0.02,
        None,
    )
    .unwrap();
    assert!(lr.rows.iter().all(|r| r.distance < 1e-12));
}

#[test]
fn zero_source_has_no_commutation_defect() {
    let m = models::burgers().unwrap();
    let d = commutation_defect(&Sequential, &m, &bump(), &[0.1, 0.05], 8, 0.02).unwrap();
    assert!(d.rows.iter().all(|r| r.1 == 0.0));
}

#[test]
fn equilibrium_is_preserved() {
    for id in ["scalar_rosenau", "radiating_gas", "rosenau", "local"] {
        let m = models::by_id(id).unwrap();
        let z = PcFn::zero(m.system.dim());
        assert!(
            evolve(&m, &z, &SplitSchedule::new(0.1, 0.3, 4, 0.01))
                .unwrap()
                .is_zero(),
            "{id}"
        );
    }
}

#[test]
fn identical_models_are_insensitive() {
    let m = models::scalar_rosenau().unwrap();
    let r = sensitivity(&m, &m, &bump(), &SplitSchedule::new(0.1, 0.3, 8, 0.01)).unwrap();
    assert_eq!(r.distance, 0.0);
    assert_eq!(r.ratio, 0.0);
}

#[test]
fn calibration_is_nonnegative() {
    let m = models::scalar_rosenau().unwrap();
    let c = calibrate_domain_constant(&m, &[bump()], 0.05, 8, 0.01).unwrap();
    assert!(c.measured >= 0.0 && c.c == 2.0 * c.measured);
}

#[test]
fn euler_run_stays_admissible() {
    let m = models::radiating_gas(Default::default()).unwrap();
    let u = PcFn::indicator(-0.5, 0.5, State::from_slice(&[0.01, 0.0, 0.01])).unwrap();
    let (f, tr) = run(&m, &u, &SplitSchedule::new(0.05, 0.2, 4, 0.01)).unwrap();
    assert_eq!(tr.rows.len(), 5);
    assert!(f.tv() > 0.0);
}

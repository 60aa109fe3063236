use super::*;
use crate::models::{self, EulerParams};
use std::vec;

/// Riemann data at 0, cut off at ±3 so its tails vanish.
fn riemann(ul: f64, ur: f64) -> PcFn {
    PcFn::scalar(&[-3.0, 0.0, 3.0], &[ul, ur]).unwrap()
}

#[test]
fn sharp_fan_of_burgers_rarefaction_is_linear() {
    let m = models::burgers().unwrap();
    let v = riemann(-1.0, 1.0);
    let fan = SharpFan::new(&m.system, &v, 0.0).unwrap();
    for zeta in [-2.0f64, -0.5, 0.0, 0.3, 0.99, 1.5] {
        let expect = zeta.clamp(-1.0, 1.0);
        assert!(
            (fan.eval(2.0, 2.0 * zeta)[0] - expect).abs() < 1e-12,
            "{zeta}"
        );
    }
}

#[test]
fn window_integral_of_sharp_fan_matches_tracking() {
    let m = models::burgers().unwrap();
    let v = riemann(-1.0, 1.0);
    let fan = SharpFan::new(&m.system, &v, 0.0).unwrap();
    let eps = 0.01;
    let w = track(&m.system, &v, 1.0, TrackOpts::new(eps)).unwrap();
    let d = window_integral(&w, &fan, 1.0, -1.5, 1.5);
    assert!(d > 0.0 && d <= eps, "{d}");
    let shock = riemann(1.0, 0.0);
    let fan = SharpFan::new(&m.system, &shock, 0.0).unwrap();
    let w = track(&m.system, &shock, 1.0, TrackOpts::new(eps)).unwrap();
    assert!(window_integral(&w, &fan, 1.0, -1.5, 1.5) < 1e-12);
}

#[test]
fn flat_solution_transports_linear_systems_exactly() {
    let m = models::linear_advection(vec![-1.0, 0.5], 4.0).unwrap();
    let v = PcFn::from_raw(
        2,
        vec![-1.0, 0.0, 1.0],
        vec![
            State::zeros(2),
            State::from_slice(&[1.0, 0.5]),
            State::from_slice(&[-0.5, 0.2]),
            State::zeros(2),
        ],
    );
    let flat = FlatSolution::new(&m.system, &v, Field::zero(2), 0.5).unwrap();
    let w = track(&m.system, &v, 0.7, TrackOpts::new(0.01)).unwrap();
    assert!(window_integral(&w, &flat, 0.7, -5.0, 5.0) < 1e-12);
}

#[test]
fn flat_source_term_is_integrated_along_characteristics() {
    let m = models::burgers().unwrap();
    let v = PcFn::zero(1);
    let g = Field::from_local(PcFn::scalar(&[0.0, 1.0], &[2.0]).unwrap());
    let flat = FlatSolution::new(&m.system, &v, g, 0.5).unwrap();
    // Frozen speed 0: the source accumulates in place.
    assert!((flat.eval(0.25, 0.5)[0] - 0.5).abs() < 1e-15);
    assert_eq!(flat.eval(0.25, 1.5)[0], 0.0);
}

#[test]
fn characterization_quotients_behave() {
    let m = models::scalar_rosenau().unwrap();
    let v = PcFn::scalar(&[-1.0, 0.0, 0.5], &[0.5, -0.25]).unwrap();
    let window = LocalWindow {
        xi: 0.0,
        a: -0.5,
        b: 0.4,
        thetas: vec![0.04, 0.01, 0.0025],
    };
    let evo = LocalEvolution {
        n: 8,
        eps: 1e-3,
        refine: 2,
    };
    let rep = check_characterization(&m, &v, &window, evo).unwrap();
    let first = rep.rows[0].sharp;
    let last = rep.rows[2].sharp;
    assert!(last < 0.25 * first, "{first} {last}");
    assert!((rep.tv - 0.75).abs() < 1e-15);
    assert!(rep.flat_ratio <= 1.0, "{}", rep.flat_ratio);
}

#[test]
fn characterization_rejects_bad_windows() {
    let m = models::burgers().unwrap();
    let v = riemann(1.0, 0.0);
    let evo = LocalEvolution {
        n: 8,
        eps: 1e-2,
        refine: 1,
    };
    let w = LocalWindow {
        xi: 1.0,
        a: -0.5,
        b: 0.5,
        thetas: vec![0.1],
    };
    assert!(check_characterization(&m, &v, &w, evo).is_err());
    let w = LocalWindow {
        xi: 0.0,
        a: -0.5,
        b: 0.5,
        thetas: vec![1.0],
    };
    assert!(check_characterization(&m, &v, &w, evo).is_err());
}

#[test]
fn rescaling_is_exact_for_tracking() {
    let m = models::burgers().unwrap();
    let u = PcFn::scalar(&[-1.0, 0.0, 1.0], &[1.0, -0.5]).unwrap();
    for row in rescaling_check(&m.system, &u, 1.0, &[0.5, 2.0, 4.0], 0.01).unwrap() {
        assert!(row.deviation < 1e-12, "{row:?}");
    }
    let e = models::by_id("radiating_gas").unwrap();
    let u = PcFn::indicator(-0.5, 0.5, State::from_slice(&[0.01, 0.0, 0.01])).unwrap();
    for row in rescaling_check(&e.system, &u, 0.2, &[2.0], 1e-3).unwrap() {
        assert!(row.deviation < 1e-10, "{row:?}");
    }
}

#[test]
fn kruzkov_and_euler_entropies_are_convex() {
    let m = models::burgers().unwrap();
    for k in [-1.0, 0.0, 0.7] {
        validate_entropy(&Kruzkov::new(&m.system, k).unwrap(), m.system.omega()).unwrap();
    }
    let eu = EulerEntropy::new(EulerParams::default()).unwrap();
    validate_entropy(&eu, &State::from_slice(&[0.05, 0.05, 0.05])).unwrap();
    assert!(Kruzkov::new(&models::by_id("radiating_gas").unwrap().system, 0.0).is_err());
}

struct Concave;

impl EntropyPair for Concave {
    fn dim(&self) -> usize {
        1
    }
    fn eta(&self, u: &State) -> f64 {
        -u[0] * u[0]
    }
    fn flux(&self, u: &State) -> f64 {
        -2.0 * u[0] * u[0] * u[0] / 3.0
    }
    fn gradient(&self, u: &State) -> State {
        State::scalar(-2.0 * u[0])
    }
}

#[test]
fn non_convex_entropy_is_rejected() {
    assert_eq!(
        validate_entropy(&Concave, &State::scalar(1.0)),
        Err(Error::NonConvexEntropy)
    );
}

#[test]
fn admissible_shock_dissipates_every_kruzkov_entropy() {
    let m = models::burgers().unwrap();
    let u = riemann(1.0, 0.0);
    let sched = SplitSchedule::new(0.1, 1.0, 8, 0.01);
    let grid = HatGrid::uniform(1.0, 5, -1.0, 2.0, 12);
    let mut most_negative: f64 = 0.0;
    for k in [0.2, 0.5, 0.8] {
        let rep =
            entropy_residual(&m, &u, &sched, &Kruzkov::new(&m.system, k).unwrap(), &grid).unwrap();
        assert_eq!(rep.max_positive, 0.0);
        most_negative = most_negative.min(rep.min);
    }
    assert!(most_negative < -1e-3);
}

#[test]
fn smooth_region_has_zero_residual() {
    let m = models::burgers().unwrap();
    let u = riemann(0.3, 0.3);
    let rep = entropy_residual(
        &m,
        &u,
        &SplitSchedule::new(0.1, 0.5, 8, 0.01),
        &Kruzkov::new(&m.system, 0.0).unwrap(),
        &HatGrid::uniform(0.5, 4, -1.0, 1.0, 8),
    )
    .unwrap();
    assert!(rep.residuals.iter().all(|r| *r == 0.0));
}

#[test]
fn rarefaction_residual_shrinks_with_eps() {
    let m = models::scalar_rosenau().unwrap();
    let u = riemann(-0.5, 0.5);
    let grid = HatGrid::uniform(0.5, 4, -1.0, 1.0, 8);
    let mut prev = f64::INFINITY;
    for (eps, s) in [(0.1, 0.1), (0.05, 0.05), (0.025, 0.025)] {
        let sched = SplitSchedule::new(s, 0.5, 8, eps);
        let worst = [-0.3, 0.05, 0.25]
            .iter()
            .map(|&k| {
                entropy_residual(&m, &u, &sched, &Kruzkov::new(&m.system, k).unwrap(), &grid)
                    .unwrap()
                    .max_positive
            })
            .fold(0.0, f64::max);
        assert!(worst < prev, "{worst} !< {prev}");
        prev = worst;
    }
    assert!(prev < 1e-3, "{prev}");
}

#[test]
fn hat_integrals_partition_unity() {
    let nodes = [0.0, 0.5, 1.5, 2.0, 3.0];
    let total: f64 = (1..4)
        .map(|i| entropy::hat_integral_for_tests(&nodes, i, 0.0, 3.0))
        .sum();
    // Interior hats integrate to half the outer intervals plus the inner ones.
    assert!((total - (3.0 - 0.25 - 0.5)).abs() < 1e-15);
}

use fracstep_core::fronttrack::{track, ScalarExact, TrackOpts};
use fracstep_core::models::{self, Burgers, RadiatingGasParams};
use fracstep_core::source::SourceOp;
use fracstep_core::splitting::{evolve, time_modulus, SplitSchedule};
use fracstep_core::stats::least_squares;
use fracstep_core::verify::{entropy_residual, rescaling_check, HatGrid, Kruzkov};
use fracstep_core::{PcFn, State};
use proptest::prelude::*;

/// Scalar piecewise-constant data with up to `max_jumps` interior values.
fn scalar_pcfn(max_jumps: usize, amp: f64) -> impl Strategy<Value = PcFn> {
    (1..=max_jumps)
        .prop_flat_map(move |k| {
            (
                proptest::collection::vec(-3.0..3.0f64, k + 1),
                proptest::collection::vec(-amp..amp, k),
            )
        })
        .prop_filter_map("distinct breaks", |(mut b, v)| {
            b.sort_by(f64::total_cmp);
            if b.windows(2).any(|w| w[1] - w[0] < 1e-3) {
                return None;
            }
            PcFn::scalar(&b, &v).ok()
        })
}

fn gas_pcfn() -> impl Strategy<Value = PcFn> {
    (
        proptest::collection::vec(-0.02..0.02f64, 3),
        proptest::collection::vec(-0.02..0.02f64, 3),
        0.2..1.5f64,
    )
        .prop_map(|(a, b, w)| {
            let ua = PcFn::indicator(-w, 0.0, State::from_slice(&a)).unwrap();
            ua.add(&PcFn::indicator(0.0, w, State::from_slice(&b)).unwrap())
                .unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn projection_is_linear_contractive_and_tv_doubling(
        u in scalar_pcfn(8, 2.0), w in scalar_pcfn(8, 2.0), a in -2.0..2.0f64, n in 1usize..16,
    ) {
        let lhs = u.lincomb(a, &w, 1.0).unwrap().project(n);
        let rhs = u.project(n).lincomb(a, &w.project(n), 1.0).unwrap();
        prop_assert!(lhs.l1_dist(&rhs).unwrap() <= 1e-12 * (1.0 + u.l1_norm() + w.l1_norm()));
        prop_assert!(u.project(n).l1_norm() <= u.l1_norm() * (1.0 + 1e-12));
        prop_assert!(u.project(n).tv() <= 2.0 * u.tv() * (1.0 + 1e-12));
    }

    #[test]
    fn l1_distance_is_a_metric(u in scalar_pcfn(6, 2.0), v in scalar_pcfn(6, 2.0), w in scalar_pcfn(6, 2.0)) {
        let d = |a: &PcFn, b: &PcFn| a.l1_dist(b).unwrap();
        prop_assert_eq!(d(&u, &v), d(&v, &u));
        prop_assert!(d(&u, &w) <= d(&u, &v) + d(&v, &w) + 1e-12);
        prop_assert_eq!(d(&u, &u), 0.0);
    }

    #[test]
    fn dilation_and_translation_act_on_integrals(u in scalar_pcfn(6, 2.0), h in -2.0..2.0f64, lam in 0.25..4.0f64) {
        let m = u.integral()[0];
        prop_assert!((u.translate(h).integral()[0] - m).abs() <= 1e-12 * (1.0 + u.l1_norm()));
        prop_assert!((u.dilate(lam).unwrap().integral()[0] * lam - m).abs() <= 1e-12 * (1.0 + u.l1_norm()));
    }

    #[test]
    fn convolution_tv_is_bounded_by_kernel_mass(u in scalar_pcfn(8, 2.0)) {
        let src = models::scalar_rosenau_source().unwrap();
        let tv = src.nonlocal_part(&u).unwrap().tv();
        prop_assert!(tv <= src.kernel_norm() * src.lip_h() * u.tv() + 1e-10);
    }

    #[test]
    fn sources_respect_declared_lipschitz_constant(u in scalar_pcfn(6, 2.0), w in scalar_pcfn(6, 2.0)) {
        let src = models::scalar_rosenau_source().unwrap();
        let d = src.apply(&u).unwrap().sub(&src.apply(&w).unwrap()).unwrap().l1_norm();
        prop_assert!(d <= src.constants().l1 * u.l1_dist(&w).unwrap() * (1.0 + 1e-8) + 1e-14);
    }

    #[test]
    fn radiating_source_respects_declared_lipschitz_constant(u in gas_pcfn(), w in gas_pcfn()) {
        let src = models::radiating_gas_source(RadiatingGasParams::default()).unwrap();
        let d = src.apply(&u).unwrap().sub(&src.apply(&w).unwrap()).unwrap().l1_norm();
        prop_assert!(d <= src.constants().l1 * u.l1_dist(&w).unwrap() * (1.0 + 1e-8) + 1e-14);
    }

    #[test]
    fn scalar_tracking_conserves_mass_and_total_variation(u in scalar_pcfn(6, 2.0), t in 0.0..2.0f64) {
        let m = models::burgers().unwrap();
        let w = track(&m.system, &u, t, TrackOpts::new(1e-2)).unwrap();
        prop_assert!((w.integral()[0] - u.integral()[0]).abs() <= 1e-12 * (1.0 + u.l1_norm()));
        prop_assert!(w.tv() <= u.tv() * (1.0 + 1e-12));
    }

    #[test]
    fn scalar_tracking_stays_within_eps_of_exact(u in scalar_pcfn(5, 2.0), t in 0.1..2.0f64) {
        let m = models::burgers().unwrap();
        let eps = 1e-2;
        let w = track(&m.system, &u, t, TrackOpts::new(eps)).unwrap();
        let exact = ScalarExact::new(&Burgers, &u, t).unwrap();
        prop_assert!(exact.l1_dist(&w).unwrap() <= eps * (1.0 + t) * u.tv());
    }

    #[test]
    fn tracking_is_l1_contractive_up_to_eps(u in scalar_pcfn(5, 2.0), w in scalar_pcfn(5, 2.0), t in 0.1..1.0f64) {
        let m = models::burgers().unwrap();
        let eps = 1e-3;
        let su = track(&m.system, &u, t, TrackOpts::new(eps)).unwrap();
        let sw = track(&m.system, &w, t, TrackOpts::new(eps)).unwrap();
        let slack = eps * (1.0 + t) * (u.tv() + w.tv());
        prop_assert!(su.l1_dist(&sw).unwrap() <= u.l1_dist(&w).unwrap() + slack);
    }

    #[test]
    fn supports_spread_at_most_at_the_speed_bound(u in scalar_pcfn(6, 2.0), t in 0.0..1.0f64) {
        let m = models::burgers().unwrap();
        let w = track(&m.system, &u, t, TrackOpts::new(1e-2)).unwrap();
        let (a, b) = u.support().unwrap();
        if let Some((c, d)) = w.support() {
            let reach = m.system.lambda_hat() * t + 1e-12;
            prop_assert!(c >= a - reach && d <= b + reach);
        }
    }

    #[test]
    fn rescaling_is_exact_for_scalar_tracking(u in scalar_pcfn(5, 2.0), lam in 0.25..4.0f64) {
        let m = models::burgers().unwrap();
        let row = rescaling_check(&m.system, &u, 0.7, &[lam], 1e-2).unwrap()[0];
        prop_assert!(row.deviation <= 1e-10 * (1.0 + u.l1_norm()));
    }

    #[test]
    fn euler_riemann_fan_ends_at_right_state(u in gas_pcfn()) {
        let m = models::radiating_gas(RadiatingGasParams::default()).unwrap();
        let ul = u.eval(-0.1);
        let ur = u.eval(0.1);
        let fan = m.system.riemann_fan(&ul, &ur, None).unwrap();
        let last = fan.waves.last().map_or(ul, |w| w.right);
        prop_assert!((last - ur).norm() <= 1e-12);
        prop_assert!(fan.waves.windows(2).all(|p| p[0].speed_right <= p[1].speed + 1e-12));
    }

    #[test]
    fn splitting_without_source_is_tracking(u in scalar_pcfn(5, 2.0), s in 0.05..0.5f64) {
        let m = models::burgers().unwrap();
        let f = evolve(&m, &u, &SplitSchedule::new(s, 1.0, 8, 1e-2)).unwrap();
        let w = track(&m.system, &u, 1.0, TrackOpts::new(1e-2)).unwrap();
        prop_assert!(f.l1_dist(&w).unwrap() <= 1e-12 * (1.0 + u.l1_norm()));
    }

    #[test]
    fn splitting_is_lipschitz_in_time(u in scalar_pcfn(4, 1.0)) {
        let m = models::scalar_rosenau().unwrap();
        let sched = SplitSchedule::new(0.05, 0.4, 8, 1e-2);
        let q = time_modulus(&m, &u, 0.4, 0.2, &sched).unwrap();
        let l = m.system.lambda_hat() * u.tv() + 2.0 * u.l1_norm();
        prop_assert!(q <= 1.5 * l + 1e-12, "{} > {}", q, l);
    }

    #[test]
    fn least_squares_recovers_lines(a in -3.0..3.0f64, b in -3.0..3.0f64) {
        let xs: Vec<f64> = (0..6).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| a * x + b).collect();
        let (s, c) = least_squares(&xs, &ys).unwrap();
        prop_assert!((s - a).abs() < 1e-12 && (c - b).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn kruzkov_residual_positive_part_is_small(u in scalar_pcfn(4, 1.0), k in -1.0..1.0f64) {
        let m = models::burgers().unwrap();
        let eps = 1e-3;
        let rep = entropy_residual(
            &m,
            &u,
            &SplitSchedule::new(0.25, 0.5, 8, eps),
            &Kruzkov::new(&m.system, k).unwrap(),
            &HatGrid::uniform(0.5, 4, -4.0, 4.0, 16),
        )
        .unwrap();
        prop_assert!(rep.max_positive <= eps * (1.0 + u.tv()), "{}", rep.max_positive);
    }
}

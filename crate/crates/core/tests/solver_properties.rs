use proptest::prelude::*;
use shadowkit::catalog::{doubling_system, scalar_contraction, scalar_expansion};
use shadowkit::combinators::{shift, shift_pseudo_orbit};
use shadowkit::verify::{check_eps_shadowing, check_limit_shadowing, orbit_residual, ORBIT_RESIDUAL_TOL};
use shadowkit::{
    generate, perturb_orbit, shadow_contracting, shadow_expanding, Anchor, DefectSchedule, MetricSpace, Point, TailTest,
    Thresholds, TimeVaryingSystem,
};

fn contraction(alpha: f64) -> TimeVaryingSystem {
    TimeVaryingSystem::autonomous(MetricSpace::euclidean(1), scalar_contraction(alpha).unwrap())
}

fn expansion(beta: f64) -> TimeVaryingSystem {
    TimeVaryingSystem::autonomous(MetricSpace::euclidean(1), scalar_expansion(beta).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn contracting_bound_dominates(alpha in 0.05f64..0.99, delta in 0.0f64..1.0, x0 in -5.0f64..5.0, seed: u64) {
        let sys = contraction(alpha);
        let p = perturb_orbit(&sys, &Point::scalar(x0), 60, &DefectSchedule::constant(delta, seed)).unwrap();
        let cert = shadow_contracting(&sys, &p, None).unwrap();
        prop_assert!(cert.bound_violations(1e-12).is_empty());
        prop_assert!(cert.max_error() <= delta / (1.0 - alpha) + 1e-12);
    }

    #[test]
    fn expanding_shadow_is_an_orbit(beta in 1.2f64..5.0, eps in 0.01f64..1.0, xn in -3.0f64..3.0, seed: u64) {
        let sys = expansion(beta);
        let delta = (beta - 1.0) * eps;
        let p = generate(&sys, Anchor::Backward(Point::scalar(xn)), 80, &DefectSchedule::constant(delta, seed)).unwrap();
        let (cert, _) = shadow_expanding(&sys, &p, 1e-10).unwrap();
        prop_assert!(orbit_residual(&sys, &cert.orbit).unwrap() <= ORBIT_RESIDUAL_TOL);
        prop_assert!(cert.max_error() <= eps + 1e-9);
    }
}

#[test]
fn flags_agree_with_independent_checks() {
    for seed in 0..50u64 {
        let sys = contraction(0.5);
        let delta = if seed % 2 == 0 { 0.05 } else { 0.4 };
        let p = perturb_orbit(&sys, &Point::scalar(1.0), 100, &DefectSchedule::constant(delta, seed)).unwrap();
        let mut cert = shadow_contracting(&sys, &p, None).unwrap();
        let tail = TailTest { window: 25, tol: 0.3 };
        cert.assess(&Thresholds { eps: Some(0.2), tail: Some(tail), exponential: None }).unwrap();

        let eps = check_eps_shadowing(&sys, &p, &cert.shadow, 0.2).unwrap();
        let lim = check_limit_shadowing(&sys, &p, &cert.shadow, 25, 0.3).unwrap();
        assert_eq!(cert.flags.eps_shadowed.unwrap().holds, eps.holds, "seed {seed}");
        assert_eq!(cert.flags.limit_ok.unwrap().holds, lim.holds, "seed {seed}");
        assert!((cert.max_error() - eps.max_error).abs() <= 1e-12);
    }
}

#[test]
fn shift_commutes_with_shadowing() {
    let sys = contraction(0.4);
    let p = perturb_orbit(&sys, &Point::scalar(2.0), 50, &DefectSchedule::constant(0.1, 3)).unwrap();
    let cert = shadow_contracting(&sys, &p, None).unwrap();
    let k = 7;
    let shifted = shift(&sys, k);
    let q = shift_pseudo_orbit(&shifted, &p, k).unwrap();
    let orbit = shifted.orbit(&cert.orbit[k], q.horizon()).unwrap();
    let eps = check_eps_shadowing(&shifted, &q, &orbit[0], 1.0).unwrap();
    for (n, e) in eps.errors.iter().enumerate() {
        assert!((e - cert.errors[n + k]).abs() <= 1e-12);
    }
}

#[test]
fn doubling_pull_back_is_exact_to_rounding() {
    let sys = doubling_system();
    let p = generate(&sys, Anchor::Backward(Point::scalar(0.3)), 40, &DefectSchedule::constant(0.25, 11)).unwrap();
    let (cert, trace) = shadow_expanding(&sys, &p, 1e-10).unwrap();
    assert!(cert.max_error() <= 0.25 + 1e-12);
    assert!(trace.z.len() >= 2);
}

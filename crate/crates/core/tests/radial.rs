use proptest::prelude::*;
use smoothreg_core::quadrature::QuadConfig;
use smoothreg_core::radial::{collision_time, time_of_flight, RadialProblem};
use smoothreg_core::{Error, PotentialSpec};

const LOG: PotentialSpec = PotentialSpec::Logarithmic;

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    (0..n)
        .map(|i| {
            let x = a + i as f64 * h;
            h / 6.0 * (f(x) + 4.0 * f(x + 0.5 * h) + f(x + h))
        })
        .sum()
}

#[test]
fn f_examples() {
    let rp = RadialProblem::new(LOG, 0.0, 0.0, 0.0).unwrap();
    assert_eq!(rp.f(1.0), 0.0);
    let r = (-0.5f64).exp();
    assert!((rp.f(r) - (-1.0f64).exp()).abs() < 1e-15);
    assert!(rp.f(1e-8) < 1e-14);
    let a = rp.apsides(f64::INFINITY).unwrap();
    assert_eq!(a.r_minus, 0.0);
    assert!((a.p - 1.0).abs() < 1e-14);
}

#[test]
fn circular_log_orbit_is_a_double_root() {
    let rp = RadialProblem::new(LOG, 0.0, 0.0, (-0.5f64).exp()).unwrap();
    let a = rp.apsides(f64::INFINITY).unwrap();
    assert!(a.circular);
    assert!((a.r_minus - (-0.5f64).exp()).abs() < 1e-6);
}

#[test]
fn log_collision_time_two_substitutions() {
    // independent route: rho = exp(-u^2/2) turns the integral into a half
    // Gaussian, integrated by composite Simpson
    let gauss = simpson(|u| (-0.5 * u * u).exp(), 0.0, 40.0, 40_000);
    let t0 = collision_time(&LOG, 0.0, 1.0, &QuadConfig::default()).unwrap().value;
    assert!((t0 - gauss).abs() < 1e-8, "{t0} {gauss}");
    assert!((t0 - (std::f64::consts::PI / 2.0).sqrt()).abs() < 1e-10);
}

#[test]
fn homogeneous_collision_time_closed_form() {
    let h = PotentialSpec::Homogeneous { alpha: 0.5 };
    let t0 = collision_time(&h, 0.0, 1.0, &QuadConfig::default()).unwrap().value;
    assert!((t0 - 0.8 / 2f64.sqrt()).abs() < 1e-10);
}

#[test]
fn collision_time_decreases_with_energy() {
    let cfg = QuadConfig::default();
    let mut prev = f64::INFINITY;
    for e in [0.0, 0.5, 1.0, 2.0, 4.0] {
        let t = collision_time(&LOG, e, 1.0, &cfg).unwrap().value;
        assert!(t < prev);
        prev = t;
    }
}

#[test]
fn weak_type_collides_only_without_angular_momentum() {
    for p in [LOG, PotentialSpec::Homogeneous { alpha: 0.5 }] {
        for l in [1e-1, 1e-2, 1e-3] {
            let rp = RadialProblem::new(p.clone(), 0.0, -0.2, l).unwrap();
            let a = rp.apsides(f64::INFINITY).unwrap();
            assert!(a.r_minus > 0.0, "{} l={l}", p.name());
        }
    }
}

#[test]
fn no_orbit_and_domain_errors() {
    let rp = RadialProblem::new(LOG, 0.0, 0.0, 0.7).unwrap();
    assert!(matches!(rp.apsides(f64::INFINITY), Err(Error::NoOrbit { .. })));
    assert!(RadialProblem::new(LOG, -1.0, 0.0, 0.1).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn apsides_bracket_the_allowed_region(e in -0.9f64..0.5, lf in 0.05f64..0.95, eps in prop_oneof![Just(0.0), 1e-4f64..1e-1]) {
        let probe = RadialProblem::new(LOG, eps, e, 0.0).unwrap();
        let fmax = probe.apsides(f64::INFINITY).map(|a| a.f_max);
        prop_assume!(fmax.is_ok());
        let l = lf * fmax.unwrap().sqrt();
        let rp = RadialProblem::new(LOG, eps, e, l).unwrap();
        let a = rp.apsides(f64::INFINITY).unwrap();
        prop_assume!(!a.circular);
        let l2 = l * l;
        prop_assert!((rp.f(a.r_minus) - l2).abs() < 1e-10);
        prop_assert!((rp.f(a.r_plus) - l2).abs() < 1e-10);
        for i in 1..=100 {
            let r = a.r_minus + (a.r_plus - a.r_minus) * i as f64 / 101.0;
            prop_assert!(rp.f(r) > l2);
        }
    }

    #[test]
    fn flight_time_is_additive_and_increasing(e in -0.8f64..0.0, lf in 0.1f64..0.9, s1 in 0.05f64..0.45, s2 in 0.55f64..0.95) {
        let probe = RadialProblem::new(LOG, 0.0, e, 0.0).unwrap();
        let fmax = probe.apsides(f64::INFINITY).unwrap().f_max;
        let rp = RadialProblem::new(LOG, 0.0, e, lf * fmax.sqrt()).unwrap();
        let a = rp.apsides(f64::INFINITY).unwrap();
        let cfg = QuadConfig::default();
        let (rb, rc) = (
            a.r_minus + s1 * (a.r_plus - a.r_minus),
            a.r_minus + s2 * (a.r_plus - a.r_minus),
        );
        let tab = rp.time_of_flight(&a, a.r_minus, rb, &cfg).unwrap().value;
        let tbc = rp.time_of_flight(&a, rb, rc, &cfg).unwrap().value;
        let tac = rp.time_of_flight(&a, a.r_minus, rc, &cfg).unwrap().value;
        prop_assert!((tab + tbc - tac).abs() < 1e-9 * tac);
        prop_assert!(tab > 0.0 && tac > tab);
        let free = time_of_flight(&rp, a.r_minus, rc, &cfg).unwrap().value;
        prop_assert!((free - tac).abs() < 1e-12 * tac);
    }

    #[test]
    fn collision_time_is_continuous_in_parameters(
        de in -1e-6f64..1e-6,
        dr in -1e-6f64..1e-6,
        eps in 0.0f64..1e-6,
        l in 0.0f64..1e-6,
    ) {
        // time from r0 = 1/2 down to the pericentre on the E = 0 collision orbit
        let cfg = QuadConfig::default();
        let t0 = collision_time(&LOG, 0.0, 0.5, &cfg).unwrap().value;
        let rp = RadialProblem::new(LOG, eps, de, l).unwrap();
        let a = rp.apsides(f64::INFINITY).unwrap();
        let t = rp.time_of_flight(&a, a.r_minus, 0.5 + dr, &cfg).unwrap().value;
        prop_assert!((t - t0).abs() < 1e-3, "{t} {t0}");
    }
}

use std::f64::consts::{FRAC_PI_2, PI};

use proptest::prelude::*;
use rand::SeedableRng;
use smoothreg_core::apsidal::*;
use smoothreg_core::extrapolate::Abscissa;
use smoothreg_core::quadrature::QuadConfig;
use smoothreg_core::radial::{Case, RadialProblem};
use smoothreg_core::{PotentialSpec, Verdict};

const LOG: PotentialSpec = PotentialSpec::Logarithmic;
const KEPLER: PotentialSpec = PotentialSpec::Homogeneous { alpha: 1.0 };

fn case1() -> Case {
    Case::Bounded {
        energy: 0.0,
        r_bar: f64::INFINITY,
    }
}

#[test]
fn pi_identity_calibration() {
    let cfg = QuadConfig::default();
    for xi in [1.0001, 1.5, 2.0, 10.0, 1e6] {
        let q = pi_identity(xi, &cfg).unwrap();
        assert!((q.value - PI).abs() < 1e-8, "xi {xi}: {}", q.value);
    }
    assert!(pi_identity(1.0, &cfg).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// Conic orbits close: every Kepler apsidal angle is pi.
    #[test]
    fn kepler_angle_is_pi(e in -0.9f64..-0.05, lf in 0.05f64..0.95) {
        let f_max = -1.0 / (2.0 * e);
        let rp = RadialProblem::new(KEPLER, 0.0, e, lf * f_max.sqrt()).unwrap();
        let r = apsidal_angle(&rp, f64::INFINITY, &QuadConfig::default()).unwrap();
        prop_assert!((r.delta_theta - PI).abs() < 1e-6, "{}", r.delta_theta);
        prop_assert!((r.i1 + r.i2 - r.delta_theta).abs() < 1e-15);
    }

    #[test]
    fn f_dominates_r_bar(u in proptest::array::uniform3(0.001f64..0.999), eps in prop_oneof![Just(1e-2), Just(1e-4)]) {
        let mut u = u;
        u.sort_by(f64::total_cmp);
        prop_assume!(u[0] < u[1] && u[1] < u[2]);
        let f = f_bound(&LOG, eps, u[0], u[1], u[2]).unwrap();
        prop_assert!(f >= u[2] - 1e-9, "F = {f} < {}", u[2]);
    }

    /// The relation between the potential drop and the chord ratio that
    /// the lower bound on `F` rests on.
    #[test]
    fn drop_ratio_relation(u in proptest::array::uniform3(0.001f64..0.999)) {
        let mut u = u;
        u.sort_by(f64::total_cmp);
        let (y, x, r) = (u[0], u[1], u[2]);
        prop_assume!(y < x && x < r);
        let q = q_ratio(&LOG, 0.0, y, x, r).unwrap();
        prop_assert!(q >= (r - x) / (r - y) * (y / x) - 1e-12);
    }

    #[test]
    fn k_below_beta(l_exp in -6.0f64..-1.0, w in 0.0f64..1.0, eps in prop_oneof![Just(1e-2), Just(1e-4)]) {
        let rp = RadialProblem::new(LOG, eps, 0.0, 10f64.powf(l_exp)).unwrap();
        let aps = rp.apsides(f64::INFINITY).unwrap();
        let rho = (aps.beta / aps.r_minus).powf(w);
        prop_assume!(rho > 1.0 && rho < aps.beta / aps.r_minus);
        let k = k_function(&rp, &aps, radial_speed_sq_at(&rp, &aps), rho).unwrap();
        prop_assert!(k <= aps.beta + 1e-9, "K = {k} beta = {}", aps.beta);
    }
}

#[test]
fn seeded_audit_has_no_violations() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    for eps in [1e-2, 1e-4] {
        let a = bound_audit(&LOG, eps, 0.0, 1.0, (1e-6, 1e-1), 1000, 1e-9, &mut rng).unwrap();
        assert_eq!((a.f_violations, a.k_violations, a.skipped), (0, 0, 0), "{a:?}");
        assert!(a.f_margin >= 0.0 && a.k_margin >= 0.0);
    }
}

#[test]
fn f_limit_on_the_diagonal() {
    for (y, r) in [(0.1, 0.5), (0.3, 0.9), (0.01, 0.02)] {
        let near = f_bound(&LOG, 1e-4, y, y * (1.0 + 1e-8), r).unwrap();
        let lim = f_bound_limit(&LOG, 1e-4, y, r).unwrap();
        assert!(near.is_finite());
        assert!((near - lim).abs() < 1e-6 * lim.abs(), "{near} {lim}");
    }
}

/// Smoothing only raises the normalized drop once `eps` is small.
#[test]
fn q_is_raised_by_small_smoothing() {
    let (y, r) = (0.2, 0.8);
    for eps in [1e-3, 1e-4, 1e-5] {
        for i in 1..50 {
            let x = y + (r - y) * i as f64 / 50.0;
            let q0 = q_ratio(&LOG, 0.0, y, x, r).unwrap();
            let q = q_ratio(&LOG, eps, y, x, r).unwrap();
            assert!(q >= q0 - 1e-14, "eps {eps} x {x}: {q} < {q0}");
        }
    }
}

#[test]
fn k_tends_to_a_positive_limit_at_both_ends() {
    let rp = RadialProblem::new(LOG, 1e-4, 0.0, 1e-3).unwrap();
    let aps = rp.apsides(f64::INFINITY).unwrap();
    let top = aps.beta / aps.r_minus;
    let lo = k_function(&rp, &aps, 0.0, 1.0 + 1e-9).unwrap();
    let hi = k_function(&rp, &aps, 0.0, top * (1.0 - 1e-9)).unwrap();
    assert!(lo > 0.0 && lo.is_finite() && lo < aps.beta);
    assert!(hi > 0.0 && hi.is_finite() && hi < aps.beta);
    assert!(k_function(&rp, &aps, 0.0, 1.0).is_err());
}

#[test]
fn log_sweep_cells_obey_decay_and_angle_bounds() {
    let paths = standard_paths(&[2, 3, 4, 5, 6]);
    let r = convergence_sweep(&LOG, &case1(), &paths, Abscissa::InverseLog, FRAC_PI_2, &QuadConfig::default()).unwrap();
    for p in &r.paths {
        for c in &p.cells {
            let a = c.outcome.as_ref().unwrap();
            assert!(a.i2 <= 2.0 * (a.r_minus / a.beta).powf(0.25) * (1.0 + 1e-6), "{a:?}");
            assert!(a.delta_theta <= PI + 1e-6);
        }
    }
}

#[test]
fn log_case2_sweep_reaches_right_angle() {
    let case = Case::Unbounded {
        energy: 1.0,
        r_bar: 1.0,
    };
    let paths = standard_paths(&[1, 2, 3, 4, 5, 6]);
    let r = convergence_sweep(&LOG, &case, &paths, Abscissa::InverseLog, FRAC_PI_2, &QuadConfig::default()).unwrap();
    assert_eq!(r.verdict(), Verdict::Holds);
    for p in &r.paths {
        assert!((p.limit().unwrap() - FRAC_PI_2).abs() < 1e-2, "{}", p.id);
    }
}

#[test]
fn homogeneous_sweep_limit_is_not_a_right_angle() {
    let path = SweepPath {
        id: "l".into(),
        points: (4..=14).map(|k| (0.0, 2f64.powi(-k))).collect(),
    };
    let case = Case::Bounded {
        energy: -1.0,
        r_bar: f64::INFINITY,
    };
    let hom = PotentialSpec::Homogeneous { alpha: 0.5 };
    let cfg = QuadConfig::default();
    let r = convergence_sweep(&hom, &case, std::slice::from_ref(&path), Abscissa::Power, 2.0 * PI / 3.0, &cfg).unwrap();
    assert_eq!(r.verdict(), Verdict::Holds);
    let r = convergence_sweep(&hom, &case, &[path], Abscissa::Power, FRAC_PI_2, &cfg).unwrap();
    assert_eq!(r.verdict(), Verdict::Fails);
}

#[test]
fn case_mismatch_is_reported() {
    let bad = Case::Bounded {
        energy: 1.0,
        r_bar: 1.0,
    };
    assert!(case_ball(&LOG, &bad).is_err());
}

use num_complex::Complex64;
use proptest::prelude::*;
use zeno::cli::{axis_values, Spacing};
use zeno::config::Config;
use zeno::perturbation;
use zeno::*;

const OMEGA: f64 = 10.0;

fn scenario(delta: f64, v: Complex64, tau: f64, period: f64, lambda: f64) -> Scenario {
    Scenario::new(
        LevelSystem::two_level(OMEGA),
        Drive::two_level(v, OMEGA - delta, DriveConvention::Rwa).unwrap(),
        DetectorModel::gaussian(1.0, lambda).unwrap(),
        Schedule::single(tau, period).unwrap(),
    )
    .unwrap()
}

fn up() -> Transition {
    Transition::new(StateId::level(0), StateId::level(1)).unwrap()
}

prop_compose! {
    fn scenarios()(
        delta in -3.0f64..3.0,
        re in -1e-2f64..1e-2,
        im in -1e-2f64..1e-2,
        tau in 0.01f64..0.5,
        stretch in 1.0f64..6.0,
        lambda in 0.0f64..1e4,
    ) -> Scenario {
        scenario(delta, Complex64::new(re, im), tau, tau * stretch, lambda)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn components_are_consistent(sc in scenarios()) {
        let w = perturbation::jump_probability(&sc, &up(), &QuadOptions::default()).unwrap();
        let scale = w.w_free + w.w_meas + w.w_interf.abs() + f64::MIN_POSITIVE;
        prop_assert!(w.w_free >= 0.0);
        prop_assert!(w.w_meas >= -1e-9 * scale);
        prop_assert!(w.w_total >= -1e-9 * scale);
        prop_assert_eq!(w.w_total, w.w_free + w.w_meas + w.w_interf);
    }

    #[test]
    fn quadratic_in_the_drive(sc in scenarios(), k in 0.1f64..10.0) {
        let quad = QuadOptions::default().with_rel_tol(1e-11);
        let w = perturbation::jump_probability(&sc, &up(), &quad).unwrap().w_total;
        let mut scaled = sc.clone();
        scaled.drive = sc.drive.scaled(k);
        let wk = perturbation::jump_probability(&scaled, &up(), &quad).unwrap().w_total;
        prop_assume!(w.abs() > 1e-300);
        prop_assert!((wk / (k * k * w) - 1.0).abs() < 1e-8, "{} vs {}", wk, k * k * w);
    }

    #[test]
    fn characteristic_function_is_bounded_and_hermitian(
        sigma in 0.01f64..10.0,
        x in -100.0f64..100.0,
    ) {
        let det = DetectorModel::gaussian(sigma, 1.0).unwrap();
        let f = det.characteristic_function(x);
        prop_assert!(f.norm() <= 1.0);
        prop_assert_eq!(det.characteristic_function(-x), f.conj());
        prop_assert_eq!(det.characteristic_function(0.0), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn survival_is_a_probability(sc in scenarios()) {
        let s = perturbation::survival(&sc, StateId::level(0), &QuadOptions::default()).unwrap();
        prop_assert!(s <= 1.0);
    }

    #[test]
    fn sweep_values_are_strictly_monotone(
        from in 1e-3f64..1e3,
        to in 1e-3f64..1e3,
        count in 2usize..200,
        log in any::<bool>(),
    ) {
        prop_assume!((to - from).abs() > 1e-6 * from.max(to));
        let spacing = if log { Spacing::Log } else { Spacing::Linear };
        let v = axis_values(from, to, count, spacing).unwrap();
        prop_assert_eq!(v.len(), count);
        prop_assert_eq!(v[0], from);
        prop_assert_eq!(v[count - 1], to);
        let up = from < to;
        prop_assert!(v.windows(2).all(|w| (w[0] < w[1]) == up && w[0] != w[1]));
    }

    #[test]
    fn config_round_trips_through_toml(
        v in -1.0f64..1.0,
        omega_l in 0.0f64..5.0,
        sigma in 0.1f64..5.0,
        lambda in 0.0f64..1e5,
        tau in 1e-3f64..1.0,
        stretch in 1.0f64..10.0,
        n in 1u32..50,
    ) {
        let text = format!(
            "[system]\n\
             levels = [{{ n = 0, energy = -0.5 }}, {{ n = 1, energy = 0.5 }}]\n\
             [drive]\n\
             omega_L = {omega_l:e}\n\
             convention = \"rwa\"\n\
             elements = [{{ f = 1, i = 0, re = {v:e}, im = 0.0 }}]\n\
             [detector]\n\
             kind = \"gaussian\"\n\
             sigma = {sigma:e}\n\
             lambda = {lambda:e}\n\
             [schedule]\n\
             tau = {tau:e}\n\
             T = {period:e}\n\
             N = {n}\n",
            period = tau * stretch,
        );
        let cfg = Config::parse(&text).unwrap();
        let again = Config::parse(&cfg.to_toml()).unwrap();
        prop_assert_eq!(&cfg, &again);
        prop_assert_eq!(cfg.drive.omega_l, omega_l);
        prop_assert_eq!(cfg.detector.lambda, lambda);
    }
}

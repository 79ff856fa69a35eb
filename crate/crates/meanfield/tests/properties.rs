use meanfield::*;
use moment_maps::{ExternalDrive, LifParams};
use proptest::prelude::*;

fn any_state() -> impl Strategy<Value = MeanFieldState> {
    (0.001f64..0.08, 0.001f64..0.08, 0.001f64..0.3, 0.001f64..0.3, 0.0f64..1.0, 0.0f64..1.0).prop_map(|(a, b, c, d, e, f)| MeanFieldState {
        mu_in: a,
        mu_out: b,
        sigma_in: c,
        sigma_out: d,
        // the packet is the more correlated group
        rho_in: e.max(f),
        rho_out: e.min(f),
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ratios_stay_bounded(s in any_state(), w in 1usize..160, r in 0.5f64..1.5) {
        let p = MeanFieldParams::new(2000, w, 0.1, r, 0.65);
        let ab = compute_ab(&s, &p, ClosedForm::Corrected, CrossTermReading::KeSquared).unwrap();
        prop_assert!(ab.b_in > 0.0 && ab.b_out > 0.0);
        prop_assert!(ab.a_in <= ab.b_in * (1.0 + 1e-12));
        prop_assert!(ab.a_out <= ab.b_out * (1.0 + 1e-12));
    }

    #[test]
    fn step_preserves_state_invariants(s in any_state(), w in 1usize..160, r in 0.7f64..1.3, dc in 10.0f64..30.0, sd in 0.0f64..3.0) {
        let p = MeanFieldParams::new(2000, w, 0.1, r, 0.65);
        let lif = LifParams::new(20.0, 20.0, 8.0, 11.0, 0.1);
        let n = meanfield_step(&s, &p, &lif, ExternalDrive::from_potential(dc, sd, 20.0), &MeanFieldOptions::default()).unwrap();
        prop_assert!(n.validate().is_ok(), "{:?}", n);
        prop_assert!(n.mu_in <= 1.0 / lif.t_ref && n.mu_out <= 1.0 / lif.t_ref);
    }

    #[test]
    fn printed_and_corrected_agree_without_cross_term(s in any_state(), w in 1usize..160, r in 0.5f64..1.5) {
        let p = MeanFieldParams::new(2000, w, 0.1, r, 0.65);
        let flat = MeanFieldState { sigma_in: s.sigma_out, ..s };
        let a = compute_ab(&flat, &p, ClosedForm::Printed, CrossTermReading::KeSquared).unwrap();
        let b = compute_ab(&flat, &p, ClosedForm::Corrected, CrossTermReading::KeSquared).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn synfire_condition_matches_interval(eps in 0.01f64..0.99, delta in 0.01f64..0.99, lambda in 0.01f64..0.99) {
        let lo = (1.0 - lambda) / eps - 1.0;
        let hi = (delta - lambda) / (lambda * (1.0 - delta));
        let cond = check_synfire_condition(eps, delta, lambda);
        prop_assume!((lo - hi).abs() > 1e-9);
        prop_assert_eq!(cond, lo < hi);
    }
}

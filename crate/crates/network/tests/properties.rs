use network::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn invariants_hold(n5 in 20usize..120, wf in 0.05f64..1.0, lambda in 0.05f64..0.5, r in 0.5f64..1.5, seed in any::<u64>()) {
        let n = n5 * 5;
        let probe = TopologyConfig { n, w: 1, lambda, r, w0: 0.5, layers: 2, seed };
        prop_assume!(probe.k_i() >= 1);
        let w = ((probe.k_e() as f64 * wf).ceil() as usize).max(1);
        let cfg = TopologyConfig { w, ..probe };
        let t = build_feedforward(&cfg).unwrap();
        let rep = empirical_degree_report(&t);
        prop_assert!(rep.totals_exact);
        for k in 0..2 {
            for i in 0..n {
                let exc = t.layer(k).excitatory(i);
                prop_assert!(exc.windows(2).all(|p| p[0] < p[1]));
                prop_assert!(t.layer(k).inhibitory(i).windows(2).all(|p| p[0] < p[1]));
                if i < w {
                    prop_assert!(exc[..w].iter().enumerate().all(|(j, &s)| s as usize == j));
                }
            }
        }
    }
}

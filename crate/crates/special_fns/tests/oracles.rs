use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use special_fns::*;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

// Reference values from 40-digit quadrature in arbitrary precision.
#[test]
fn frozen_point_values() {
    let cases = [
        (1.0, 4.439_093_016_628_066),
        (0.0, 0.886_226_925_452_758),
        (-10.0, 0.049_753_659_391_223_49),
        (-20.0, 0.024_968_866_461_415_694),
        (2.5, 917.967_003_625_958_9),
        (-3.0, 0.158_635_639_863_987_54),
    ];
    for (u, want) in cases {
        assert!(rel(dawson_minus(u).unwrap(), want) < 1e-12, "D({u})");
    }
    assert!(rel(log_dawson_minus(5.0).unwrap(), 25.572_364_942_923_93) < 1e-13);
    assert!(rel(log_dawson_minus(30.0).unwrap(), 900.0 + std::f64::consts::PI.sqrt().ln()) < 1e-6);
    assert!((log_dawson_minus(0.0).unwrap() - (-0.120_782_237_635_245_2)).abs() < 1e-12);
    let tens = [
        (0.0, 0.307_142_847_356_944),
        (-20.0, 1.552_811_716_275_447e-5),
        (1.0, 8.593_664_249_315_961),
        (-2.0, 0.009_941_189_715_956_539),
        (3.0, 36_747_919.498_259_81),
    ];
    for (u, want) in tens {
        assert!(rel(dawson_tensor(u).unwrap(), want) < 1e-9, "T({u})");
    }
    let spec = QuadratureSpec::default();
    assert!(rel(integrate_dminus(-1.0, 1.0, &spec).unwrap(), 2.592_482_719_566_860_4) < 1e-9);
    assert!(rel(integrate_dminus(0.0, 2.0, &spec).unwrap(), 28.297_131_296_494_04) < 1e-9);
    assert!(rel(integrate_dtensor(-2.0, 0.0, &spec).unwrap(), 0.141_915_348_742_273_5) < 1e-8);
    assert!(rel(integrate_dtensor(-1.0, 2.0, &spec).unwrap(), 391.043_702_579_171_95) < 1e-8);
}

#[test]
fn asymptotics_and_edge_cases() {
    let d = dawson_minus(-10.0).unwrap();
    assert!((0.0497..=0.0503).contains(&d));
    assert!(dawson_tensor(-20.0).unwrap() < 1e-2);
    assert!(dawson_tensor(1.0).unwrap() > dawson_tensor(0.0).unwrap());
    assert!(dawson_minus(f64::NAN).is_err());
    assert!(dawson_tensor(f64::INFINITY).is_err());
    assert_eq!(passage_bound(0.0, 0.0, 1.0, 1.0).unwrap(), 0.0);
    assert_eq!(passage_bound(20.0, 20.0, 5.0, 1.0).unwrap(), 0.0);
    assert_eq!(passage_bound(20.0, 10.0, 4.0, 1.0).unwrap(), 2.5);
    assert!(passage_bound(20.0, 10.0, 0.0, 1.0).is_err());
    let spec = QuadratureSpec::default();
    assert_eq!(integrate_dminus(0.7, 0.7, &spec).unwrap(), 0.0);
    assert_eq!(integrate_dtensor(0.7, 0.7, &spec).unwrap(), 0.0);
    assert!(QuadratureSpec::new(0.0, 1e-12, 10).is_err());
    assert!(QuadratureSpec::new(1e-9, 1e-12, 0).is_err());
}

#[test]
fn convergence_failure_reports_estimate() {
    let spec = QuadratureSpec::new(1e-15, 1e-300, 1).unwrap();
    match integrate_dtensor(-5.0, 5.0, &spec) {
        Err(SpecialFnError::Convergence { estimate, .. }) => assert!(estimate > 0.0),
        other => panic!("expected convergence error, got {other:?}"),
    }
}

/// Independent oracle: cumulative trapezoid sums on a fine grid, built only
/// from `exp`, with no error-function code shared with the library.
struct GridOracle {
    lo: f64,
    h: f64,
    d: Vec<f64>,
    t: Vec<f64>,
    f1: Vec<f64>,
    f2: Vec<f64>,
}

impl GridOracle {
    fn new() -> Self {
        let lo: f64 = -13.0;
        let hi: f64 = 5.5;
        let h: f64 = 2e-5;
        let n = ((hi - lo) / h).round() as usize;
        let u = |i: usize| lo + i as f64 * h;
        let mut g = 0.0;
        let mut d = vec![0.0; n + 1];
        for i in 1..=n {
            g += 0.5 * h * ((-u(i - 1) * u(i - 1)).exp() + (-u(i) * u(i)).exp());
            d[i] = (u(i) * u(i)).exp() * g;
        }
        let mut hsum = 0.0;
        let mut t = vec![0.0; n + 1];
        let inner = |i: usize| (-u(i) * u(i)).exp() * d[i] * d[i];
        for i in 1..=n {
            hsum += 0.5 * h * (inner(i - 1) + inner(i));
            t[i] = (u(i) * u(i)).exp() * hsum;
        }
        let mut f1 = vec![0.0; n + 1];
        let mut f2 = vec![0.0; n + 1];
        for i in 1..=n {
            f1[i] = f1[i - 1] + 0.5 * h * (d[i - 1] + d[i]);
            f2[i] = f2[i - 1] + 0.5 * h * (t[i - 1] + t[i]);
        }
        Self { lo, h, d, t, f1, f2 }
    }
    fn at(&self, v: &[f64], x: f64) -> f64 {
        let p = (x - self.lo) / self.h;
        let i = p.floor() as usize;
        let w = p - i as f64;
        v[i] * (1.0 - w) + v[i + 1] * w
    }
}

#[test]
fn matches_grid_oracle_on_random_points() {
    let oracle = GridOracle::new();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let spec = QuadratureSpec::default();
    let table = dawson_table();
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let u: f64 = rng.random_range(-5.0..5.0);
        worst = worst.max(rel(dawson_minus(u).unwrap(), oracle.at(&oracle.d, u)));
        worst = worst.max(rel(dawson_tensor(u).unwrap(), oracle.at(&oracle.t, u)));
        let a: f64 = rng.random_range(-5.0..5.0);
        let b: f64 = rng.random_range(-5.0..5.0);
        let want1 = oracle.at(&oracle.f1, b) - oracle.at(&oracle.f1, a);
        let want2 = oracle.at(&oracle.f2, b) - oracle.at(&oracle.f2, a);
        worst = worst.max(rel(integrate_dminus(a, b, &spec).unwrap(), want1));
        worst = worst.max(rel(integrate_dtensor(a, b, &spec).unwrap(), want2));
        worst = worst.max(rel(table.int_dminus(a, b), want1));
        worst = worst.max(rel(table.int_dtensor(a, b), want2));
    }
    assert!(worst < 1e-6, "worst relative deviation {worst}");
}

#[test]
fn table_matches_adaptive_everywhere() {
    let spec = QuadratureSpec::default();
    let table = dawson_table();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let a: f64 = rng.random_range(-60.0..7.5);
        let b: f64 = rng.random_range(-60.0..7.5);
        let t1 = table.int_dminus(a, b);
        let q1 = integrate_dminus(a, b, &spec).unwrap();
        assert!(rel(t1, q1) < 1e-8, "dminus {a} {b}: {t1} vs {q1}");
        let t2 = table.int_dtensor(a, b);
        let q2 = integrate_dtensor(a, b, &spec).unwrap();
        assert!(rel(t2, q2) < 1e-8, "dtensor {a} {b}: {t2} vs {q2}");
    }
}

#[test]
fn tail_cutoff_is_stable() {
    // Extending the far-left part of the interval by a factor of two changes
    // the integral of the decaying tensor tail only by the tail mass itself.
    let spec = QuadratureSpec::default();
    let near = integrate_dtensor(-40.0, -3.0, &spec).unwrap();
    let far = integrate_dtensor(-80.0, -3.0, &spec).unwrap();
    let tail = integrate_dtensor(-80.0, -40.0, &spec).unwrap();
    assert!(rel(far, near + tail) < 1e-9);
    assert!(tail / far < 1e-2);
}

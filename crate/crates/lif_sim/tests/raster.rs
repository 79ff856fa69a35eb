use lif_sim::*;
use network::{build_feedforward, TopologyConfig};
use proptest::prelude::*;
use std::io::Cursor;

fn roundtrip(config: &str, layers: &[(usize, &SpikeData)]) -> Raster {
    let mut buf = Vec::new();
    write_raster(&mut buf, config, layers).unwrap();
    read_raster(Cursor::new(buf)).unwrap()
}

#[test]
fn simulated_raster_round_trips_exactly() {
    let t = build_feedforward(&TopologyConfig { n: 200, w: 10, lambda: 0.1, r: 1.0, w0: 0.5, layers: 2, seed: 3 }).unwrap();
    let inputs = generate_inputs(&InputSpec { duration_ms: 1000.0, seed: 4, ..Default::default() }, 200, &(0..10).collect::<Vec<_>>()).unwrap();
    let opts = SimOptions { ext: ExternalDrive::from_potential(16.0, 4.0, 20.0), seed: 9 };
    let out = simulate_chain(&t, &inputs, &LifParams::default(), &opts).unwrap();
    let layers = [(0, &inputs), (1, &out[0]), (2, &out[1])];
    let back = roundtrip("n=200 w=10", &layers);
    assert_eq!(back.config, "n=200 w=10");
    assert_eq!(back.layers.len(), 3);
    for ((k, a), (kb, b)) in layers.iter().zip(&back.layers) {
        assert_eq!(k, kb);
        assert_eq!(*a, b);
    }
}

#[test]
fn silent_layers_survive() {
    let s = SpikeData::silent(7, 250.0);
    let back = roundtrip("", &[(4, &s)]);
    assert_eq!(back.layers, vec![(4, s)]);
}

#[test]
fn writer_rejects_inconsistent_layers() {
    let a = SpikeData::silent(5, 100.0);
    let b = SpikeData::silent(6, 100.0);
    assert!(write_raster(Vec::new(), "", &[(1, &a), (2, &b)]).is_err());
    assert!(write_raster(Vec::new(), "two\nlines", &[(1, &a)]).is_err());
    assert!(write_raster(Vec::new(), "", &[]).is_err());
}

fn parse(text: &str) -> Result<Raster> {
    read_raster(Cursor::new(text.as_bytes()))
}

#[test]
fn reader_rejects_corruption() {
    let head = "# duration_ms=100 n=3 layers=1 config=x\nlayer,neuron_id,time_ms\n";
    assert!(parse(&format!("{head}1,0,1.000\n1,0,2.500\n1,2,99.999\n")).is_ok());
    for body in [
        "1,0,2.000\n1,0,1.000\n", // not increasing
        "1,0,1.000\n1,0,1.000\n", // duplicate
        "1,0,100.000\n",          // outside the recording
        "1,3,1.000\n",            // neuron out of range
        "2,0,1.000\n",            // undeclared layer
        "1,0\n",                  // missing field
        "1,0,abc\n",              // not a number
        "1,0,-1.000\n",
    ] {
        assert!(parse(&format!("{head}{body}")).is_err(), "accepted {body:?}");
    }
    assert!(parse("").is_err());
    assert!(parse("layer,neuron_id,time_ms\n").is_err());
    assert!(parse("# duration_ms=100 n=3 layers=1\nlayer,neuron_id,time_ms\n").is_err());
    assert!(parse("# duration_ms=100 n=3 layers=1 config=x\nneuron,layer,time\n").is_err());
    match parse(&format!("{head}1,0,1.000\n1,0,x\n")) {
        Err(SimError::Parse { line, .. }) => assert_eq!(line, 4),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn spike_data_validation() {
    assert!(SpikeData::new(10.0, vec![vec![1.0, 2.0]]).is_ok());
    assert!(SpikeData::new(10.0, vec![vec![2.0, 1.0]]).is_err());
    assert!(SpikeData::new(10.0, vec![vec![10.0]]).is_err());
    assert!(SpikeData::new(0.0, vec![]).is_err());
    let s = SpikeData::new(1000.0, vec![vec![1.0, 5.0], vec![], vec![2.0, 4.5]]).unwrap();
    assert_eq!(s.total_spikes(), 4);
    assert_eq!(s.min_isi(), Some(2.5));
    assert!((s.mean_rate_hz(0..3) - 4.0 / 3.0).abs() < 1e-12);
}

fn arb_data() -> impl Strategy<Value = SpikeData> {
    (1usize..6, 1u64..5_000_000).prop_flat_map(|(n, dur_us)| {
        let dur = dur_us as f64 / 1000.0;
        prop::collection::vec(prop::collection::btree_set(0..dur_us, 0..20), n).prop_map(move |sets| {
            let trains = sets.into_iter().map(|s| s.into_iter().map(|us| us as f64 / 1000.0).collect()).collect();
            SpikeData { duration: dur, trains }
        })
    })
}

proptest! {
    #[test]
    fn quantized_times_print_exactly(t in 0.0f64..1e7) {
        let q = quantize_ms(t);
        prop_assert_eq!(format!("{q:.3}").parse::<f64>().unwrap(), q);
        prop_assert!((q - t).abs() <= 5e-4 + 1e-9);
    }

    #[test]
    fn any_valid_raster_round_trips(d in arb_data(), k in 0usize..30) {
        d.validate().unwrap();
        let back = roundtrip("p", &[(k, &d)]);
        prop_assert_eq!(back.layers, vec![(k, d)]);
    }
}

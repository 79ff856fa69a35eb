use harness::*;

fn record(exp: &str, w: usize, seed: Option<u64>, layer: usize) -> Record {
    Record {
        experiment: exp.into(),
        r: 1.0,
        w,
        lambda: 0.1,
        seed,
        layer,
        rho_in_theory: Some(0.9),
        rho_out_theory: Some(0.1),
        rho_in_sim: None,
        rho_out_sim: None,
        mu_out_hz: Some(12.5),
        cv_mean: None,
        label: "synfire".into(),
        wall_ms: 3.0,
    }
}

#[test]
fn csv_has_the_documented_header() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig::default();
    let sink = ResultSink::open(dir.path(), "x", &cfg).unwrap();
    sink.write_point(&[record("t", 30, None, 0), record("t", 30, None, 1)]).unwrap();
    let text = std::fs::read_to_string(sink.path()).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), COLUMNS.join(","));
    assert_eq!(lines.next().unwrap(), "t,1.0,30,0.1,,0,0.9,0.1,,,12.5,,synfire,3.0");
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn reopening_resumes_only_with_the_same_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig::default();
    let rows = [record("t", 30, Some(2), 5), record("t", 30, Some(2), 6)];
    {
        let sink = ResultSink::open(dir.path(), "x", &cfg).unwrap();
        sink.write_point(&rows).unwrap();
    }
    let key = rows[0].key();
    let sink = ResultSink::open(dir.path(), "x", &cfg).unwrap();
    assert!(sink.is_done(&key));
    assert_eq!(sink.previous(&key), rows.to_vec());
    sink.write_point(&[record("t", 31, Some(2), 5)]).unwrap();
    drop(sink);
    let sink = ResultSink::open(dir.path(), "x", &cfg).unwrap();
    assert!(sink.is_done(&record("t", 31, Some(2), 5).key()));

    let mut other = cfg.clone();
    other.network.r = 0.9;
    let fresh = ResultSink::open(dir.path(), "x", &other).unwrap();
    assert!(!fresh.is_done(&key));
    assert_eq!(std::fs::read_to_string(fresh.path()).unwrap().lines().count(), 1);
}

#[test]
fn manifest_records_hash_and_notes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig::default();
    let path = write_manifest(dir.path(), "w_sweep", &cfg, &["window W_a = 31".into()]).unwrap();
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.contains(&format!("config_hash = {}", cfg.hash())));
    assert!(text.contains("note = window W_a = 31"));
    assert!(text.contains("[network]"));
}

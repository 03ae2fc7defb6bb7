use std::fs;
use std::sync::Arc;

use rotgn::config::ExperimentConfig;
use rotgn::grid::{Field, Grid, GridSpec};
use rotgn::output::{field_rows, read_profile, sha256_file, write_outputs, DataTable, Report, SUMMARY_FILE};

fn sample_report() -> Report {
    let mut table = DataTable::csv("series.csv", &["t", "x", "w"]);
    table.push(vec![0.0, 0.5, 1.0 / 3.0]);
    table.push(vec![0.1, 1e-300, -2.5e20]);
    let mut dump = DataTable::columns("series.dat", &["t", "err"]);
    dump.push(vec![1.0, 2.0]);
    Report {
        command: "test".into(),
        config: Some(ExperimentConfig::default()),
        seed: Some(7),
        results: serde_json::json!({ "answer": 42 }),
        tables: vec![table, dump],
    }
}

#[test]
fn empty_report_lists_only_the_summary() {
    let dir = tempfile::tempdir().unwrap();
    let m = write_outputs(&Report::default(), dir.path()).unwrap();
    assert_eq!(m.files.len(), 1);
    assert_eq!(m.files[0].path, SUMMARY_FILE);
    assert!(dir.path().join("manifest.json").exists());
}

#[test]
fn manifest_hashes_match_files() {
    let dir = tempfile::tempdir().unwrap();
    let m = write_outputs(&sample_report(), dir.path()).unwrap();
    assert_eq!(m.files.len(), 3);
    for entry in &m.files {
        let path = dir.path().join(&entry.path);
        assert_eq!(sha256_file(&path).unwrap(), entry.sha256);
        assert_eq!(fs::metadata(&path).unwrap().len(), entry.bytes);
    }
}

#[test]
fn csv_has_header_and_round_tripping_numbers() {
    let dir = tempfile::tempdir().unwrap();
    write_outputs(&sample_report(), dir.path()).unwrap();
    let text = fs::read_to_string(dir.path().join("series.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,x,w"));
    let row: Vec<f64> = lines.next().unwrap().split(',').map(|s| s.parse().unwrap()).collect();
    assert_eq!(row, vec![0.0, 0.5, 1.0 / 3.0]);
    let dat = fs::read_to_string(dir.path().join("series.dat")).unwrap();
    assert_eq!(dat, "# t err\n1.0 2.0\n");
}

#[test]
fn summary_echoes_config_and_version() {
    let dir = tempfile::tempdir().unwrap();
    write_outputs(&sample_report(), dir.path()).unwrap();
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join(SUMMARY_FILE)).unwrap()).unwrap();
    assert_eq!(v["tool"], "rotgn");
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["seed"], 7);
    assert_eq!(v["results"]["answer"], 42);
    assert_eq!(v["config"]["grid"]["n"], 512);
}

#[test]
fn rewriting_is_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let ma = write_outputs(&sample_report(), a.path()).unwrap();
    let mb = write_outputs(&sample_report(), b.path()).unwrap();
    assert_eq!(ma, mb);
}

#[test]
fn unwritable_directory_reports_path() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let err = write_outputs(&Report::default(), &blocker.join("sub")).unwrap_err();
    assert_eq!(err.exit_code(), 4);
    assert!(err.to_string().contains("file"), "{err}");
}

#[test]
fn profile_round_trips_through_csv() {
    let grid = Grid::<f64>::new(GridSpec { n: 64, length: 10.0, ..Default::default() }).unwrap();
    let f = Field::from_fn(&grid, |x| (x * 0.7).sin());
    let mut table = DataTable::csv("u0.csv", &["x", "value"]);
    for row in field_rows(&f) {
        table.push(row);
    }
    let dir = tempfile::tempdir().unwrap();
    write_outputs(&Report { tables: vec![table], ..Default::default() }, dir.path()).unwrap();
    let back = read_profile(&dir.path().join("u0.csv"), &grid).unwrap();
    assert_eq!(back.values(), f.values());
}

#[test]
fn profile_with_wrong_length_is_rejected() {
    let grid: Arc<Grid<f64>> = Grid::new(GridSpec { n: 32, length: 10.0, ..Default::default() }).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u0.csv");
    fs::write(&path, "x,value\n0,1\n").unwrap();
    let err = read_profile(&path, &grid).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    let err = read_profile(&dir.path().join("missing.csv"), &grid).unwrap_err();
    assert_eq!(err.exit_code(), 4);
}

use std::path::Path;
use std::process::{Command, Output};

use islmatch::io::{read_records, Format, MetricsRecord, SweepRecord};
use islmatch::sim::SolverKind;

fn islmatch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_islmatch")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn run_streams_csv_with_schema_line() {
    let o = islmatch(&["run", "walker_delta_2x40", "--snapshots", "3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "# islmatch-metrics v1");
    assert!(lines[1].starts_with("run_id,s,t,solver,transceivers,M,N,pair_count"));
    assert_eq!(lines.len(), 5);
    assert!(lines[2].starts_with("walker_delta_2x40,0,0.0,hungarian,1,2,80,"));
}

#[test]
fn run_writes_a_readable_file() {
    let dir = tempfile::tempdir().unwrap();
    for (name, format) in [("m.csv", Format::Csv), ("m.jsonl", Format::JsonLines)] {
        let path = dir.path().join(name);
        let o = islmatch(&[
            "--out",
            path.to_str().unwrap(),
            "run",
            "walker_delta_5x40",
            "--solver",
            "greedy",
            "--transceivers",
            "2",
            "--snapshots",
            "20",
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        let rows: Vec<MetricsRecord> = read_records(&path, format).unwrap();
        assert_eq!(rows.len(), 20);
        assert!(rows.iter().all(|r| r.transceivers == 2 && r.solver == SolverKind::Greedy));
        assert!(rows.iter().all(|r| r.pair_count == r.p_low_pairs + r.p_high_pairs));
    }
}

#[test]
fn sweep_expands_the_grid() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let o = islmatch(&[
        "--out",
        path.to_str().unwrap(),
        "sweep",
        "walker_delta",
        "--planes",
        "2..3",
        "--sats-per-plane",
        "10",
        "--eta",
        "1",
        "--solvers",
        "greedy,markovian",
        "--transceivers",
        "1",
        "--snapshots",
        "5",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows: Vec<SweepRecord> = read_records(&path, Format::Csv).unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.snapshots == 5 && r.violations == 0));
}

#[test]
fn bench_prints_one_line_per_solver() {
    let o = islmatch(&["bench", "walker_delta_2x40", "--snapshots", "20", "--stride", "5", "--repetitions", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    for solver in ["hungarian", "greedy", "markovian"] {
        assert!(text.contains(solver), "{text}");
    }
}

#[test]
fn validate_accepts_every_builtin() {
    for name in ["walker_delta", "walker_delta_2x40", "walker_delta_5x40"] {
        let o = islmatch(&["validate", name]);
        assert!(o.status.success(), "{name}: {}", stderr(&o));
        assert!(stdout(&o).contains("ok"));
    }
}

#[test]
fn validate_reports_the_offending_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "[constellation]\nplanes = 2\nsatellites_per_plane = 10\n\n[policy]\neta = 0\n\n[simulation]\nsolver = \"greedy\"\n").unwrap();
    let o = islmatch(&["validate", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("line 6"), "{err}");
    assert!(err.contains("eta"), "{err}");
}

#[test]
fn exit_codes() {
    assert_eq!(islmatch(&["bogus"]).status.code(), Some(1));
    assert_eq!(islmatch(&["run"]).status.code(), Some(1));
    assert_eq!(islmatch(&["run", "walker_delta_2x40", "--solver", "simplex"]).status.code(), Some(1));
    assert_eq!(islmatch(&["--help"]).status.code(), Some(0));
    assert_eq!(islmatch(&["run", "no_such_scenario"]).status.code(), Some(2));
    let o = islmatch(&["run", "walker_delta_2x40", "--transceivers", "2", "--snapshots", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("one transceiver"));
    let o = islmatch(&["--out", "/nonexistent/dir/x.csv", "run", "walker_delta_2x40", "--snapshots", "1"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("/nonexistent/dir"));
    assert!(!Path::new("/nonexistent/dir/x.csv").exists());
}

//! Versioned CSV and JSON-lines output.
//!
//! CSV files start with a `# <schema> v<version>` comment, then the header.
//! JSON-lines files start with a header object naming the schema, version
//! and columns, then one object per record.

use std::fmt;
use std::fs;
use std::io::{BufRead, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tempfile::NamedTempFile;

use crate::error::{Error, Result};
use crate::sim::{BenchRow, RunSummary, SimulationPlan, SnapshotMetrics, SolverKind, SweepRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Format {
    Csv,
    JsonLines,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "jsonl" | "json-lines" | "ndjson" => Ok(Format::JsonLines),
            other => Err(format!("unknown format `{other}` (expected csv or jsonl)")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::JsonLines => "jsonl",
        })
    }
}

/// A flat record type with a fixed, versioned column list.
pub trait Schema: Serialize + DeserializeOwned {
    const NAME: &'static str;
    const VERSION: u32;
    const COLUMNS: &'static [&'static str];
}

/// One row per snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub run_id: String,
    pub s: u64,
    pub t: f64,
    pub solver: SolverKind,
    pub transceivers: u8,
    #[serde(rename = "M")]
    pub planes: usize,
    #[serde(rename = "N")]
    pub satellites: usize,
    pub pair_count: usize,
    pub retained_count: usize,
    pub handovers: usize,
    #[serde(rename = "total_cost_W")]
    pub total_cost_w: f64,
    pub p_low_pairs: usize,
    pub p_high_pairs: usize,
    pub solve_time_s: f64,
}

impl Schema for MetricsRecord {
    const NAME: &'static str = "islmatch-metrics";
    const VERSION: u32 = 1;
    const COLUMNS: &'static [&'static str] = &[
        "run_id",
        "s",
        "t",
        "solver",
        "transceivers",
        "M",
        "N",
        "pair_count",
        "retained_count",
        "handovers",
        "total_cost_W",
        "p_low_pairs",
        "p_high_pairs",
        "solve_time_s",
    ];
}

impl MetricsRecord {
    pub fn new(plan: &SimulationPlan, m: &SnapshotMetrics) -> Self {
        MetricsRecord {
            run_id: plan.name.clone(),
            s: m.s as u64,
            t: m.t,
            solver: plan.solver,
            transceivers: plan.transceivers.count(),
            planes: plan.config.num_planes(),
            satellites: plan.config.total_satellites(),
            pair_count: m.pairs,
            retained_count: m.retained,
            handovers: m.handovers,
            total_cost_w: m.total_cost_w,
            p_low_pairs: m.low_pairs,
            p_high_pairs: m.high_pairs,
            solve_time_s: m.solve_time_s,
        }
    }
}

/// One row per sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub run_id: String,
    #[serde(rename = "M")]
    pub planes: usize,
    pub n_per_plane: usize,
    #[serde(rename = "N")]
    pub satellites: usize,
    pub eta: f64,
    pub solver: SolverKind,
    pub transceivers: u8,
    pub snapshots: usize,
    pub mean_pairs: f64,
    pub relative_power: Option<f64>,
    pub mean_contact_s: Option<f64>,
    pub handover_rate: f64,
    pub mean_solve_time_s: f64,
    pub max_solve_time_s: f64,
    pub violations: usize,
}

impl Schema for SweepRecord {
    const NAME: &'static str = "islmatch-sweep";
    const VERSION: u32 = 1;
    const COLUMNS: &'static [&'static str] = &[
        "run_id",
        "M",
        "n_per_plane",
        "N",
        "eta",
        "solver",
        "transceivers",
        "snapshots",
        "mean_pairs",
        "relative_power",
        "mean_contact_s",
        "handover_rate",
        "mean_solve_time_s",
        "max_solve_time_s",
        "violations",
    ];
}

impl SweepRecord {
    pub fn new(row: &SweepRow) -> Self {
        let s: &RunSummary = &row.summary;
        SweepRecord {
            run_id: s.name.clone(),
            planes: row.point.planes,
            n_per_plane: row.point.sats_per_plane,
            satellites: s.satellites,
            eta: row.point.eta,
            solver: row.point.solver,
            transceivers: row.point.transceivers,
            snapshots: s.snapshots,
            mean_pairs: s.mean_pairs,
            relative_power: s.relative_power,
            mean_contact_s: s.mean_contact_s(),
            handover_rate: s.handover_rate(),
            mean_solve_time_s: s.mean_solve_time_s,
            max_solve_time_s: s.max_solve_time_s,
            violations: s.violations,
        }
    }
}

/// One row per benchmarked solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub run_id: String,
    pub solver: SolverKind,
    pub transceivers: u8,
    #[serde(rename = "M")]
    pub planes: usize,
    #[serde(rename = "N")]
    pub satellites: usize,
    pub samples: usize,
    pub repetitions: usize,
    pub median_s: f64,
    pub mean_s: f64,
    pub max_s: f64,
}

impl Schema for BenchRecord {
    const NAME: &'static str = "islmatch-bench";
    const VERSION: u32 = 1;
    const COLUMNS: &'static [&'static str] =
        &["run_id", "solver", "transceivers", "M", "N", "samples", "repetitions", "median_s", "mean_s", "max_s"];
}

impl BenchRecord {
    pub fn new(plan: &SimulationPlan, row: &BenchRow) -> Self {
        BenchRecord {
            run_id: plan.name.clone(),
            solver: row.solver,
            transceivers: plan.transceivers.count(),
            planes: plan.config.num_planes(),
            satellites: plan.config.total_satellites(),
            samples: row.samples,
            repetitions: row.repetitions,
            median_s: row.median_s,
            mean_s: row.mean_s,
            max_s: row.max_s,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct JsonHeader {
    schema: String,
    version: u32,
    columns: Vec<String>,
}

// one per writer, so the size gap is irrelevant
#[allow(clippy::large_enum_variant)]
enum Sink<W: Write> {
    Csv(csv::Writer<W>),
    Json(W),
}

/// Streams records of one schema to a writer.
pub struct RecordWriter<R: Schema, W: Write> {
    sink: Sink<W>,
    _record: std::marker::PhantomData<R>,
}

impl<R: Schema, W: Write> RecordWriter<R, W> {
    /// Writes the schema line and header.
    pub fn new(mut out: W, format: Format) -> Result<Self> {
        let sink = match format {
            Format::Csv => {
                writeln!(out, "# {} v{}", R::NAME, R::VERSION).map_err(stream_err)?;
                let mut w = csv::WriterBuilder::new()
                    .has_headers(false)
                    .terminator(csv::Terminator::Any(b'\n'))
                    .from_writer(out);
                w.write_record(R::COLUMNS).map_err(csv_err)?;
                Sink::Csv(w)
            }
            Format::JsonLines => {
                let header = JsonHeader {
                    schema: R::NAME.into(),
                    version: R::VERSION,
                    columns: R::COLUMNS.iter().map(|c| c.to_string()).collect(),
                };
                serde_json::to_writer(&mut out, &header).map_err(|e| Error::Metrics(e.to_string()))?;
                out.write_all(b"\n").map_err(stream_err)?;
                Sink::Json(out)
            }
        };
        Ok(RecordWriter { sink, _record: std::marker::PhantomData })
    }

    pub fn write(&mut self, record: &R) -> Result<()> {
        match &mut self.sink {
            Sink::Csv(w) => w.serialize(record).map_err(csv_err),
            Sink::Json(w) => {
                serde_json::to_writer(&mut *w, record).map_err(|e| Error::Metrics(e.to_string()))?;
                w.write_all(b"\n").map_err(stream_err)
            }
        }
    }

    pub fn finish(self) -> Result<W> {
        match self.sink {
            Sink::Csv(w) => w.into_inner().map_err(|e| stream_err(e.into_error())),
            Sink::Json(mut w) => {
                w.flush().map_err(stream_err)?;
                Ok(w)
            }
        }
    }
}

pub type MetricsWriter<W> = RecordWriter<MetricsRecord, W>;

fn stream_err(e: std::io::Error) -> Error {
    Error::io("<output stream>", e)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Metrics(e.to_string())
}

/// Serializes `records` into a byte buffer.
pub fn to_bytes<R: Schema>(records: &[R], format: Format) -> Result<Vec<u8>> {
    let mut w = RecordWriter::<R, _>::new(Vec::new(), format)?;
    for r in records {
        w.write(r)?;
    }
    w.finish()
}

/// Parses output produced by [`RecordWriter`], checking schema and version.
pub fn parse_records<R: Schema>(input: impl BufRead, format: Format) -> Result<Vec<R>> {
    let mut lines = input.lines();
    let first = lines.next().transpose().map_err(stream_err)?.ok_or_else(|| Error::Metrics("empty input".into()))?;
    match format {
        Format::Csv => {
            let expected = format!("# {} v{}", R::NAME, R::VERSION);
            if first.trim_end() != expected {
                return Err(Error::Metrics(format!("expected `{expected}`, found `{first}`")));
            }
            let rest: Vec<String> = lines.collect::<std::io::Result<_>>().map_err(stream_err)?;
            let body = rest.join("\n");
            let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(body.as_bytes());
            let header = reader.headers().map_err(csv_err)?;
            if header.iter().ne(R::COLUMNS.iter().copied()) {
                return Err(Error::Metrics(format!("unexpected header {header:?}")));
            }
            reader.deserialize().map(|r| r.map_err(csv_err)).collect()
        }
        Format::JsonLines => {
            let header: JsonHeader =
                serde_json::from_str(&first).map_err(|e| Error::Metrics(format!("bad header: {e}")))?;
            if header.schema != R::NAME || header.version != R::VERSION {
                return Err(Error::Metrics(format!(
                    "expected schema {} v{}, found {} v{}",
                    R::NAME,
                    R::VERSION,
                    header.schema,
                    header.version
                )));
            }
            if header.columns.iter().ne(R::COLUMNS.iter()) {
                return Err(Error::Metrics(format!("unexpected columns {:?}", header.columns)));
            }
            lines
                .filter(|l| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
                .map(|l| {
                    let l = l.map_err(stream_err)?;
                    serde_json::from_str(&l).map_err(|e| Error::Metrics(e.to_string()))
                })
                .collect()
        }
    }
}

/// A file that only appears at its final path once committed. Dropping it
/// uncommitted leaves nothing behind.
pub struct AtomicFile {
    path: PathBuf,
    tmp: BufWriter<NamedTempFile>,
}

impl AtomicFile {
    pub fn create(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let dir = match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        };
        if path.is_dir() {
            return Err(Error::io(&path, std::io::Error::new(std::io::ErrorKind::IsADirectory, "is a directory")));
        }
        let tmp = NamedTempFile::new_in(&dir).map_err(|e| Error::io(&path, e))?;
        Ok(AtomicFile { path, tmp: BufWriter::new(tmp) })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn commit(self) -> Result<()> {
        let path = self.path;
        let tmp = self.tmp.into_inner().map_err(|e| Error::io(&path, e.into_error()))?;
        tmp.as_file().sync_all().map_err(|e| Error::io(&path, e))?;
        tmp.persist(&path).map_err(|e| Error::io(&path, e.error))?;
        Ok(())
    }
}

impl Write for AtomicFile {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        self.tmp.write(buf)
    }

    fn flush(&mut self) -> std::io::Result<()> {
        self.tmp.flush()
    }
}

/// Writes `records` to `path` atomically.
pub fn emit_records<R: Schema>(records: &[R], path: impl AsRef<Path>, format: Format) -> Result<()> {
    let file = AtomicFile::create(path.as_ref())?;
    let path = file.path().to_path_buf();
    let mut w = RecordWriter::<R, _>::new(file, format).map_err(|e| relabel(e, &path))?;
    for r in records {
        w.write(r).map_err(|e| relabel(e, &path))?;
    }
    w.finish().map_err(|e| relabel(e, &path))?.commit()
}

/// Reads a file written by [`emit_records`].
pub fn read_records<R: Schema>(path: impl AsRef<Path>, format: Format) -> Result<Vec<R>> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_records(std::io::BufReader::new(file), format).map_err(|e| relabel(e, path))
}

/// Puts the real path on stream errors.
pub(crate) fn relabel(e: Error, path: &Path) -> Error {
    match e {
        Error::Io { source, .. } => Error::io(path, source),
        Error::Metrics(m) => Error::Metrics(format!("{}: {m}", path.display())),
        other => other,
    }
}

/// Guesses the format from a file extension.
pub fn format_for_path(path: &Path) -> Option<Format> {
    match path.extension()?.to_str()? {
        "csv" => Some(Format::Csv),
        "jsonl" | "ndjson" => Some(Format::JsonLines),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(s: u64) -> MetricsRecord {
        MetricsRecord {
            run_id: "a,b \"quoted\"".into(),
            s,
            t: s as f64 * 3.41,
            solver: SolverKind::Markovian,
            transceivers: 2,
            planes: 5,
            satellites: 200,
            pair_count: 90,
            retained_count: 88,
            handovers: 2,
            total_cost_w: 0.1 + 0.2 * s as f64,
            p_low_pairs: 60,
            p_high_pairs: 30,
            solve_time_s: 1.234e-5,
        }
    }

    #[test]
    fn one_snapshot_is_header_plus_one_row() {
        let bytes = to_bytes(&[record(0)], Format::Csv).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "# islmatch-metrics v1");
        assert_eq!(lines[1], MetricsRecord::COLUMNS.join(","));
        assert!(text.ends_with('\n'));
    }

    #[test]
    fn round_trip_both_formats() {
        let records: Vec<_> = (0..20).map(record).collect();
        for format in [Format::Csv, Format::JsonLines] {
            let bytes = to_bytes(&records, format).unwrap();
            let back: Vec<MetricsRecord> = parse_records(bytes.as_slice(), format).unwrap();
            assert_eq!(back, records, "{format}");
            assert_eq!(to_bytes(&back, format).unwrap(), bytes);
        }
    }

    #[test]
    fn empty_output_still_has_header() {
        let bytes = to_bytes::<MetricsRecord>(&[], Format::JsonLines).unwrap();
        let back: Vec<MetricsRecord> = parse_records(bytes.as_slice(), Format::JsonLines).unwrap();
        assert!(back.is_empty());
    }

    #[test]
    fn wrong_version_is_refused() {
        let text = "# islmatch-metrics v0\nrun_id\n";
        assert!(parse_records::<MetricsRecord>(text.as_bytes(), Format::Csv).is_err());
    }

    #[test]
    fn sweep_record_with_missing_power_round_trips() {
        let r = SweepRecord {
            run_id: "x".into(),
            planes: 4,
            n_per_plane: 40,
            satellites: 160,
            eta: 1.0,
            solver: SolverKind::Greedy,
            transceivers: 1,
            snapshots: 1,
            mean_pairs: 0.0,
            relative_power: None,
            mean_contact_s: Some(3.41),
            handover_rate: 0.0,
            mean_solve_time_s: 1e-6,
            max_solve_time_s: 2e-6,
            violations: 0,
        };
        for format in [Format::Csv, Format::JsonLines] {
            let bytes = to_bytes(std::slice::from_ref(&r), format).unwrap();
            let back: Vec<SweepRecord> = parse_records(bytes.as_slice(), format).unwrap();
            assert_eq!(back, vec![r.clone()]);
        }
    }

    #[test]
    fn atomic_file_appears_on_commit_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        emit_records(&[record(1)], &path, Format::Csv).unwrap();
        let back: Vec<MetricsRecord> = read_records(&path, Format::Csv).unwrap();
        assert_eq!(back, vec![record(1)]);

        let other = dir.path().join("n.csv");
        {
            let mut f = AtomicFile::create(&other).unwrap();
            f.write_all(b"partial").unwrap();
        }
        assert!(!other.exists());
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn unwritable_path_is_named() {
        let e = emit_records(&[record(0)], "/nonexistent-dir/x.csv", Format::Csv).unwrap_err();
        assert!(e.to_string().contains("/nonexistent-dir/x.csv"), "{e}");
    }
}

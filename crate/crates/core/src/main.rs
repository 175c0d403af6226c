use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand};

use islmatch::io::metrics::format_for_path;
use islmatch::io::{
    builtin_scenario, parse_scenario, AtomicFile, BenchRecord, Format, MetricsRecord, RecordWriter, Scenario, Schema,
    SweepRecord,
};
use islmatch::matching::Transceivers;
use islmatch::sim::{self, SimulationPlan, SolverKind, SweepPoint};
use islmatch::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

/// Inter-plane link matching simulator for Walker-delta constellations.
#[derive(Debug, Parser)]
#[command(name = "islmatch", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format: csv or jsonl.
    #[arg(long, global = true)]
    format: Option<Format>,

    /// Picks which snapshots `bench` samples; the simulation itself is
    /// deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// More log output (repeat for debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scenario and write per-snapshot metrics.
    Run {
        /// Scenario file or built-in scenario name.
        scenario: String,
        #[arg(long)]
        solver: Option<SolverKind>,
        #[arg(long)]
        transceivers: Option<u8>,
        #[arg(long)]
        snapshots: Option<usize>,
    },
    /// Run a grid of plane counts, sizes, eta values, solvers and transceiver
    /// counts and write one summary row per run.
    Sweep {
        scenario: String,
        /// Plane counts as `a..b` (inclusive) or a comma list.
        #[arg(long)]
        planes: Option<PlaneList>,
        #[arg(long, value_delimiter = ',')]
        sats_per_plane: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        eta: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        solvers: Option<Vec<SolverKind>>,
        #[arg(long, value_delimiter = ',')]
        transceivers: Option<Vec<u8>>,
        #[arg(long)]
        snapshots: Option<usize>,
    },
    /// Time solvers on identical snapshots.
    Bench {
        scenario: String,
        #[arg(long, value_delimiter = ',', default_value = "hungarian,greedy,markovian")]
        solvers: Vec<SolverKind>,
        #[arg(long)]
        transceivers: Option<u8>,
        #[arg(long)]
        snapshots: Option<usize>,
        /// Solves per timed snapshot; the median is kept.
        #[arg(long, default_value_t = 5)]
        repetitions: usize,
        /// Time every k-th snapshot.
        #[arg(long, default_value_t = 10)]
        stride: usize,
    },
    /// Parse and check a scenario without running it.
    Validate { scenario: String },
}

/// Inclusive plane range `a..b` or a comma list.
#[derive(Debug, Clone)]
struct PlaneList(Vec<usize>);

impl FromStr for PlaneList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("expected `a..b` or a comma list, got `{s}`");
        if let Some((a, b)) = s.split_once("..") {
            let a: usize = a.trim().parse().map_err(|_| bad())?;
            let b: usize = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
            if a > b {
                return Err(format!("empty range `{s}`"));
            }
            return Ok(PlaneList((a..=b).collect()));
        }
        s.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>().map(PlaneList)
    }
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Unsupported(_) | Error::Domain { .. } => Failure::Config(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

impl From<islmatch::io::ConfigError> for Failure {
    fn from(e: islmatch::io::ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).parse_default_env().init();

    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}

fn load(name: &str) -> Result<Scenario, Failure> {
    let path = Path::new(name);
    let text = if path.is_file() {
        std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("{name}: {e}")))?
    } else if let Some(text) = builtin_scenario(name) {
        text.to_string()
    } else {
        return Err(Failure::Config(format!("{name}: no such file or built-in scenario")));
    };
    parse_scenario(&text).map_err(|e| Failure::Config(format!("{name}: {e}")))
}

fn transceivers(n: u8) -> Result<Transceivers, Failure> {
    Transceivers::from_count(n).ok_or_else(|| Failure::Config(format!("transceivers must be 1 or 2, got {n}")))
}

/// Where and how results go.
fn destination(cli: &Cli, scenario: &Scenario) -> (Option<PathBuf>, Format) {
    // a path given on the command line overrides both scenario settings
    if let Some(out) = &cli.out {
        let format = cli.format.or_else(|| format_for_path(out)).unwrap_or(Format::Csv);
        return (Some(out.clone()), format);
    }
    let out = scenario.output_path.as_ref().map(PathBuf::from);
    let format = cli
        .format
        .or(scenario.output_format)
        .or_else(|| out.as_deref().and_then(format_for_path))
        .unwrap_or(Format::Csv);
    (out, format)
}

/// Streams records to a file (atomically) or to standard output.
fn with_writer<R: Schema>(
    out: Option<&Path>,
    format: Format,
    body: impl FnOnce(&mut dyn FnMut(&R) -> islmatch::Result<()>) -> Result<(), Failure>,
) -> Result<(), Failure> {
    match out {
        Some(path) => {
            let file = AtomicFile::create(path)?;
            let mut w = RecordWriter::<R, _>::new(file, format)?;
            body(&mut |r| w.write(r))?;
            w.finish()?.commit()?;
            log::info!("wrote {}", path.display());
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = RecordWriter::<R, _>::new(BufWriter::new(stdout.lock()), format)?;
            body(&mut |r| w.write(r))?;
            w.finish()?.flush().map_err(|e| Failure::Runtime(format!("standard output: {e}")))?;
        }
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Validate { scenario } => {
            let s = load(scenario)?;
            let p = &s.plan;
            println!(
                "{scenario}: ok ({} planes, {} satellites, {} solver, {} transceiver(s), {} snapshots of {} s)",
                p.config.num_planes(),
                p.config.total_satellites(),
                p.solver,
                p.transceivers.count(),
                p.snapshots,
                p.sampling_period_s
            );
            Ok(())
        }
        Command::Run { scenario, solver, transceivers: trx, snapshots } => {
            let s = load(scenario)?;
            let mut plan = s.plan.clone();
            if let Some(solver) = solver {
                plan.solver = *solver;
            }
            if let Some(n) = trx {
                plan.transceivers = transceivers(*n)?;
            }
            if let Some(n) = snapshots {
                plan.snapshots = *n;
            }
            plan.validate()?;
            let (out, format) = destination(cli, &s);
            let mut summary = None;
            with_writer::<MetricsRecord>(out.as_deref(), format, |emit| {
                let run_plan = plan.clone();
                summary = Some(sim::run(run_plan, |o| emit(&MetricsRecord::new(&plan, &o.metrics)))?);
                Ok(())
            })?;
            if let Some(sum) = summary {
                eprintln!(
                    "{}: {} snapshots, mean pairs {:.3}, relative power {}, mean solve {:.3e} s, mean contact {}, violations {}",
                    sum.name,
                    sum.snapshots,
                    sum.mean_pairs,
                    sum.relative_power.map_or("n/a".into(), |p| format!("{p:.4}")),
                    sum.mean_solve_time_s,
                    sum.mean_contact_s().map_or("n/a".into(), |c| format!("{c:.1} s")),
                    sum.violations
                );
            }
            Ok(())
        }
        Command::Sweep { scenario, planes, sats_per_plane, eta, solvers, transceivers: trx, snapshots } => {
            let mut s = load(scenario)?;
            if let Some(p) = planes {
                if let Some(&bad) = p.0.iter().find(|&&m| m < 2) {
                    return Err(Failure::Config(format!("plane counts must be at least 2, got {bad}")));
                }
                s.sweep.planes = p.0.clone();
            }
            if let Some(v) = sats_per_plane {
                s.sweep.satellites_per_plane = v.clone();
            }
            if let Some(v) = eta {
                s.sweep.eta = v.clone();
            }
            if let Some(v) = solvers {
                s.sweep.solvers = v.clone();
            }
            if let Some(v) = trx {
                s.sweep.transceivers = v.iter().map(|&n| transceivers(n)).collect::<Result<_, _>>()?;
            }
            let points = s.sweep_points();
            if points.is_empty() {
                return Err(Failure::Config("the sweep has no runnable points".into()));
            }
            let plans: Vec<(SweepPoint, SimulationPlan)> = points
                .iter()
                .map(|p| {
                    let mut plan = s.plan_for(p)?;
                    if let Some(n) = snapshots {
                        plan.snapshots = *n;
                    }
                    plan.validate()?;
                    Ok((*p, plan))
                })
                .collect::<Result<_, Failure>>()?;
            let (out, format) = destination(cli, &s);
            with_writer::<SweepRecord>(out.as_deref(), format, |emit| {
                for (k, (point, plan)) in plans.into_iter().enumerate() {
                    log::info!("[{}/{}] {}", k + 1, points.len(), plan.name);
                    let summary = sim::run(plan, |_| Ok(()))?;
                    emit(&SweepRecord::new(&sim::SweepRow { point, summary }))?;
                }
                Ok(())
            })
        }
        Command::Bench { scenario, solvers, transceivers: trx, snapshots, repetitions, stride } => {
            let s = load(scenario)?;
            let mut plan = s.plan.clone();
            if let Some(n) = trx {
                plan.transceivers = transceivers(*n)?;
            }
            if let Some(n) = snapshots {
                plan.snapshots = *n;
            }
            if solvers.is_empty() {
                return Err(Failure::Config("no solvers given".into()));
            }
            let stride = (*stride).max(1);
            let offset = cli.seed.map_or(0, |seed| (seed % stride as u64) as usize);
            let rows = sim::bench(&plan, solvers, *repetitions, stride, offset)?;
            let fastest = rows.iter().map(|r| r.median_s).fold(f64::INFINITY, f64::min);
            let mut table = format!(
                "{:<10} {:>8} {:>14} {:>14} {:>14} {:>9}\n",
                "solver", "samples", "median_s", "mean_s", "max_s", "x_fastest"
            );
            for r in &rows {
                table += &format!(
                    "{:<10} {:>8} {:>14.4e} {:>14.4e} {:>14.4e} {:>9.1}\n",
                    r.solver.name(),
                    r.samples,
                    r.median_s,
                    r.mean_s,
                    r.max_s,
                    r.median_s / fastest
                );
            }
            let records: Vec<BenchRecord> = rows.iter().map(|r| BenchRecord::new(&plan, r)).collect();
            match &cli.out {
                Some(path) => {
                    let format = cli.format.or_else(|| format_for_path(path)).unwrap_or(Format::Csv);
                    islmatch::io::emit_records(&records, path, format)?;
                    print!("{table}");
                }
                None if cli.format.is_some() => {
                    with_writer::<BenchRecord>(None, cli.format.unwrap(), |emit| {
                        records.iter().try_for_each(emit).map_err(Failure::from)
                    })?;
                }
                None => print!("{table}"),
            }
            Ok(())
        }
    }
}

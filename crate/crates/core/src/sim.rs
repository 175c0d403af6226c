//! Snapshot loop: propagate, build costs, solve, account.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{slant_range, ConstellationConfig, SatelliteState};
use crate::linkbudget::{build_cost_matrix, CostMatrix, LinkBudgetParams, PowerLevel, PowerPolicy};
use crate::matching::{
    solve_greedy, solve_hungarian, solve_markovian, solve_two_transceiver, solve_two_transceiver_markovian, Assignment,
    MatchState, Pair, SideTable, Transceivers,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Hungarian,
    Greedy,
    Markovian,
}

impl SolverKind {
    pub const ALL: [SolverKind; 3] = [SolverKind::Hungarian, SolverKind::Greedy, SolverKind::Markovian];

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Hungarian => "hungarian",
            SolverKind::Greedy => "greedy",
            SolverKind::Markovian => "markovian",
        }
    }

    pub fn is_stateful(self) -> bool {
        self == SolverKind::Markovian
    }

    /// Rejects solver and constellation combinations that cannot run.
    pub fn check_supported(self, transceivers: Transceivers, num_planes: usize) -> Result<()> {
        if self == SolverKind::Hungarian {
            if transceivers == Transceivers::Two {
                return Err(Error::Unsupported("the Hungarian solver supports one transceiver only".into()));
            }
            if num_planes != 2 {
                return Err(Error::Unsupported(format!(
                    "the Hungarian solver supports exactly 2 planes, got {num_planes}"
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hungarian" => Ok(SolverKind::Hungarian),
            "greedy" | "heuristic" | "independent" => Ok(SolverKind::Greedy),
            "markovian" | "markov" => Ok(SolverKind::Markovian),
            other => Err(format!("unknown solver `{other}` (expected hungarian, greedy or markovian)")),
        }
    }
}

/// Everything needed to run one simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationPlan {
    /// Identifier written into every metrics row.
    pub name: String,
    pub config: ConstellationConfig,
    pub link: LinkBudgetParams,
    pub eta: f64,
    /// Zero-based plane whose neighbour distance scales the power ranges.
    pub reference_plane: usize,
    pub solver: SolverKind,
    pub transceivers: Transceivers,
    pub t_start_s: f64,
    pub sampling_period_s: f64,
    pub snapshots: usize,
}

/// Replication runs cover at least this many snapshots...
pub const MIN_REPLICATION_SNAPSHOTS: usize = 10_000;
/// ...and at least this many periods of the lowest plane.
pub const MIN_REPLICATION_PERIODS: f64 = 5.0;

impl SimulationPlan {
    /// Plan with the evaluation defaults: `eta = 1`, power ranges from the
    /// highest plane, default link budget, default sampling period and
    /// enough snapshots for five periods of the lowest plane.
    pub fn new(
        name: impl Into<String>,
        config: ConstellationConfig,
        solver: SolverKind,
        transceivers: Transceivers,
    ) -> Self {
        let sampling_period_s = default_sampling_period(&config);
        let reference_plane = config.num_planes() - 1;
        let duration = MIN_REPLICATION_PERIODS * config.lowest_plane_period();
        SimulationPlan {
            name: name.into(),
            link: LinkBudgetParams::default(),
            eta: 1.0,
            reference_plane,
            solver,
            transceivers,
            t_start_s: 0.0,
            sampling_period_s,
            snapshots: snapshots_for(duration, sampling_period_s),
            config,
        }
    }

    pub fn duration_s(&self) -> f64 {
        self.snapshots as f64 * self.sampling_period_s
    }

    pub fn with_duration(mut self, duration_s: f64) -> Self {
        self.snapshots = snapshots_for(duration_s, self.sampling_period_s);
        self
    }

    pub fn time_of(&self, s: usize) -> f64 {
        self.t_start_s + s as f64 * self.sampling_period_s
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sampling_period_s > 0.0) || !self.sampling_period_s.is_finite() {
            return Err(Error::domain("sampling period must be positive", self.sampling_period_s));
        }
        if self.snapshots == 0 {
            return Err(Error::domain("a run needs at least one snapshot", 0.0));
        }
        if !self.t_start_s.is_finite() {
            return Err(Error::domain("start time must be finite", self.t_start_s));
        }
        self.solver.check_supported(self.transceivers, self.config.num_planes())?;
        self.policy().map(|_| ())
    }

    pub fn policy(&self) -> Result<PowerPolicy> {
        PowerPolicy::new(&self.config, &self.link, self.eta, self.reference_plane)
    }

    /// Whether the run is long enough to stand in for the published
    /// experiments.
    pub fn is_replication_scale(&self) -> bool {
        self.snapshots >= MIN_REPLICATION_SNAPSHOTS
            && self.duration_s() >= MIN_REPLICATION_PERIODS * self.config.lowest_plane_period() * (1.0 - 1e-12)
    }
}

/// Five periods of the lowest plane split into 10 000 snapshots.
pub fn default_sampling_period(config: &ConstellationConfig) -> f64 {
    MIN_REPLICATION_PERIODS * config.lowest_plane_period() / MIN_REPLICATION_SNAPSHOTS as f64
}

/// `ceil(duration / T_ho)`, at least one.
pub fn snapshots_for(duration_s: f64, sampling_period_s: f64) -> usize {
    let ratio = duration_s / sampling_period_s;
    // absorb rounding in ratios that are exact integers
    let k = (ratio - 1e-9 * ratio.abs().max(1.0)).ceil();
    (k.max(1.0)) as usize
}

/// Runs `f` and returns its result with the elapsed wall-clock time in
/// seconds, read from the monotonic clock (nanosecond resolution on Linux).
pub fn measure_solver_time<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64())
}

/// Solves one snapshot with the given solver.
pub fn solve(
    solver: SolverKind,
    transceivers: Transceivers,
    costs: &CostMatrix,
    sides: &SideTable<'_>,
    state: &MatchState,
) -> Result<Assignment> {
    let side = |i, j| sides.side(i, j);
    Ok(match (solver, transceivers) {
        (SolverKind::Hungarian, Transceivers::One) => solve_hungarian(costs)?,
        (SolverKind::Hungarian, Transceivers::Two) => {
            return Err(Error::Unsupported("the Hungarian solver supports one transceiver only".into()))
        }
        (SolverKind::Greedy, Transceivers::One) => solve_greedy(costs),
        (SolverKind::Greedy, Transceivers::Two) => solve_two_transceiver(costs, side),
        (SolverKind::Markovian, Transceivers::One) => solve_markovian(costs, state),
        (SolverKind::Markovian, Transceivers::Two) => solve_two_transceiver_markovian(costs, side, state),
    })
}

/// Per-snapshot accounting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotMetrics {
    pub s: usize,
    pub t: f64,
    pub solve_time_s: f64,
    pub pairs: usize,
    pub total_cost_w: f64,
    pub low_pairs: usize,
    pub high_pairs: usize,
    /// Links of the previous snapshot that are gone.
    pub handovers: usize,
    /// Links present in both this and the previous snapshot.
    pub retained: usize,
    /// Mean of `P_t / P_low` over this snapshot's links.
    pub relative_power: Option<f64>,
    /// Constraint violations found by the built-in checker.
    pub violations: usize,
}

/// One solved snapshot.
#[derive(Debug, Clone)]
pub struct SnapshotOutcome {
    pub metrics: SnapshotMetrics,
    pub states: Vec<SatelliteState>,
    pub costs: CostMatrix,
    pub assignment: Assignment,
}

/// Follows link identities across consecutive snapshots.
///
/// A link's contact time is the number of consecutive snapshots it is
/// present times the sampling period; a handover is a link present at
/// `s - 1` and absent at `s`. Links still open when the run ends are
/// closed at their observed length.
#[derive(Debug, Clone)]
pub struct ContactTracker {
    sampling_period_s: f64,
    /// Open links with their current run length, sorted by key.
    open: Vec<((usize, usize), u64)>,
    closed: Vec<u64>,
    handovers: u64,
    snapshots: u64,
}

/// Change between two consecutive snapshots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Transition {
    pub handovers: usize,
    pub retained: usize,
}

impl ContactTracker {
    pub fn new(sampling_period_s: f64) -> Self {
        ContactTracker { sampling_period_s, open: Vec::new(), closed: Vec::new(), handovers: 0, snapshots: 0 }
    }

    pub fn observe(&mut self, assignment: &Assignment) -> Transition {
        let mut next = Vec::with_capacity(assignment.len());
        let mut t = Transition::default();
        let mut old = self.open.iter().peekable();
        for p in assignment.pairs() {
            let key = p.key();
            while let Some(&&(k, run)) = old.peek() {
                if k >= key {
                    break;
                }
                self.closed.push(run);
                t.handovers += 1;
                old.next();
            }
            match old.peek() {
                Some(&&(k, run)) if k == key => {
                    next.push((key, run + 1));
                    t.retained += 1;
                    old.next();
                }
                _ => next.push((key, 1)),
            }
        }
        for &(_, run) in old {
            self.closed.push(run);
            t.handovers += 1;
        }
        self.open = next;
        self.handovers += t.handovers as u64;
        self.snapshots += 1;
        t
    }

    pub fn finish(mut self) -> ContactStats {
        self.closed.extend(self.open.iter().map(|&(_, run)| run));
        ContactStats {
            sampling_period_s: self.sampling_period_s,
            runs: self.closed,
            handovers: self.handovers,
            snapshots: self.snapshots,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContactStats {
    pub sampling_period_s: f64,
    /// Length of every contact, in snapshots.
    pub runs: Vec<u64>,
    pub handovers: u64,
    pub snapshots: u64,
}

impl ContactStats {
    pub fn durations_s(&self) -> impl Iterator<Item = f64> + '_ {
        self.runs.iter().map(|&r| r as f64 * self.sampling_period_s)
    }

    pub fn mean_contact_s(&self) -> Option<f64> {
        (!self.runs.is_empty())
            .then(|| self.runs.iter().sum::<u64>() as f64 / self.runs.len() as f64 * self.sampling_period_s)
    }

    pub fn max_contact_s(&self) -> Option<f64> {
        self.runs.iter().max().map(|&r| r as f64 * self.sampling_period_s)
    }

    /// Handovers per snapshot transition.
    pub fn handover_rate(&self) -> f64 {
        if self.snapshots < 2 {
            0.0
        } else {
            self.handovers as f64 / (self.snapshots - 1) as f64
        }
    }
}

/// Contact times and handovers over consecutive assignments of one run.
pub fn track_contacts<'a>(
    assignments: impl IntoIterator<Item = &'a Assignment>,
    sampling_period_s: f64,
) -> ContactStats {
    let mut tracker = ContactTracker::new(sampling_period_s);
    for a in assignments {
        tracker.observe(a);
    }
    tracker.finish()
}

/// Aggregates over a whole run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub name: String,
    pub solver: SolverKind,
    pub transceivers: u8,
    pub planes: usize,
    pub satellites: usize,
    pub snapshots: usize,
    pub mean_solve_time_s: f64,
    pub max_solve_time_s: f64,
    /// Time average of the per-snapshot mean `P_t / P_low`; snapshots
    /// without links are skipped.
    pub relative_power: Option<f64>,
    pub mean_pairs: f64,
    pub mean_total_cost_w: f64,
    pub mean_retained: f64,
    pub contacts: ContactStats,
    pub violations: usize,
}

impl RunSummary {
    pub fn mean_contact_s(&self) -> Option<f64> {
        self.contacts.mean_contact_s()
    }

    pub fn handover_rate(&self) -> f64 {
        self.contacts.handover_rate()
    }
}

#[derive(Debug, Default)]
struct Totals {
    solve_time: f64,
    max_solve_time: f64,
    pairs: f64,
    cost: f64,
    retained: f64,
    relative_power: f64,
    relative_power_snapshots: usize,
    violations: usize,
}

/// Step-by-step simulation driver.
pub struct Simulation {
    plan: SimulationPlan,
    policy: PowerPolicy,
    buffers: Vec<bool>,
    state: MatchState,
    next: usize,
    tracker: ContactTracker,
    totals: Totals,
}

impl Simulation {
    pub fn new(plan: SimulationPlan) -> Result<Self> {
        plan.validate()?;
        let policy = plan.policy()?;
        let n = plan.config.total_satellites();
        Ok(Simulation {
            tracker: ContactTracker::new(plan.sampling_period_s),
            buffers: vec![true; n],
            state: MatchState::default(),
            next: 0,
            totals: Totals::default(),
            policy,
            plan,
        })
    }

    pub fn plan(&self) -> &SimulationPlan {
        &self.plan
    }

    pub fn policy(&self) -> &PowerPolicy {
        &self.policy
    }

    /// Solves the next snapshot; `None` once the plan is exhausted.
    pub fn step(&mut self) -> Result<Option<SnapshotOutcome>> {
        if self.next >= self.plan.snapshots {
            return Ok(None);
        }
        let s = self.next;
        let t = self.plan.time_of(s);
        let states = self.plan.config.states_at(t);
        let costs = build_cost_matrix(&states, &self.policy, &self.buffers);
        let sides = SideTable::new(&states);
        self.state.s = s as u64;

        let (assignment, solve_time_s) = {
            let state = &self.state;
            let plan = &self.plan;
            measure_solver_time(|| solve(plan.solver, plan.transceivers, &costs, &sides, state))
        };
        let assignment = assignment?;

        let violations = count_violations(&assignment, &costs, &states, &self.policy, self.plan.transceivers);
        let transition = self.tracker.observe(&assignment);
        let (mut low, mut high, mut ratio_sum) = (0, 0, 0.0);
        for p in assignment.pairs() {
            match self.policy.level_of_cost(p.cost) {
                PowerLevel::Low => low += 1,
                PowerLevel::High => high += 1,
            }
            ratio_sum += p.cost / self.policy.p_low_w;
        }
        let relative_power = (!assignment.is_empty()).then(|| ratio_sum / assignment.len() as f64);
        let metrics = SnapshotMetrics {
            s,
            t,
            solve_time_s,
            pairs: assignment.len(),
            total_cost_w: assignment.total_cost(),
            low_pairs: low,
            high_pairs: high,
            handovers: transition.handovers,
            retained: transition.retained,
            relative_power,
            violations,
        };

        let tot = &mut self.totals;
        tot.solve_time += solve_time_s;
        tot.max_solve_time = tot.max_solve_time.max(solve_time_s);
        tot.pairs += metrics.pairs as f64;
        tot.cost += metrics.total_cost_w;
        tot.retained += metrics.retained as f64;
        tot.violations += violations;
        if let Some(r) = relative_power {
            tot.relative_power += r;
            tot.relative_power_snapshots += 1;
        }

        self.state = MatchState::new(assignment.clone(), s as u64);
        self.next += 1;
        Ok(Some(SnapshotOutcome { metrics, states, costs, assignment }))
    }

    pub fn finish(self) -> RunSummary {
        let k = self.next.max(1) as f64;
        let tot = self.totals;
        RunSummary {
            name: self.plan.name.clone(),
            solver: self.plan.solver,
            transceivers: self.plan.transceivers.count(),
            planes: self.plan.config.num_planes(),
            satellites: self.plan.config.total_satellites(),
            snapshots: self.next,
            mean_solve_time_s: tot.solve_time / k,
            max_solve_time_s: tot.max_solve_time,
            relative_power: (tot.relative_power_snapshots > 0)
                .then(|| tot.relative_power / tot.relative_power_snapshots as f64),
            mean_pairs: tot.pairs / k,
            mean_total_cost_w: tot.cost / k,
            mean_retained: tot.retained / k,
            contacts: self.tracker.finish(),
            violations: tot.violations,
        }
    }
}

/// Runs a whole plan, handing each snapshot to `observe` as soon as it is
/// solved.
pub fn run(plan: SimulationPlan, mut observe: impl FnMut(&SnapshotOutcome) -> Result<()>) -> Result<RunSummary> {
    let mut sim = Simulation::new(plan)?;
    while let Some(outcome) = sim.step()? {
        observe(&outcome)?;
    }
    Ok(sim.finish())
}

/// Assignment constraint violations plus links longer than the high-power
/// range.
pub fn count_violations(
    assignment: &Assignment,
    costs: &CostMatrix,
    states: &[SatelliteState],
    policy: &PowerPolicy,
    transceivers: Transceivers,
) -> usize {
    let structural = usize::from(assignment.validate(costs, transceivers).is_err());
    let out_of_range = assignment
        .pairs()
        .iter()
        .filter(|p: &&Pair| slant_range(&states[p.a], &states[p.b]) > policy.l_high_km)
        .count();
    structural + out_of_range
}

/// Solve-time statistics of one solver over sampled snapshots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub solver: SolverKind,
    pub samples: usize,
    pub repetitions: usize,
    /// Median over snapshots of the per-snapshot median.
    pub median_s: f64,
    pub mean_s: f64,
    pub max_s: f64,
}

/// Times each solver on identical snapshot inputs.
///
/// Every `stride`-th snapshot starting at `offset` is timed; each timing is
/// the median of `repetitions` solves. The Markovian chain is advanced on
/// every snapshot so its history is the one a real run would see. Runs
/// strictly sequentially.
pub fn bench(
    plan: &SimulationPlan,
    solvers: &[SolverKind],
    repetitions: usize,
    stride: usize,
    offset: usize,
) -> Result<Vec<BenchRow>> {
    plan.validate()?;
    for &solver in solvers {
        solver.check_supported(plan.transceivers, plan.config.num_planes())?;
    }
    let repetitions = repetitions.max(1);
    let stride = stride.max(1);
    let policy = plan.policy()?;
    let buffers = vec![true; plan.config.total_satellites()];
    let mut chain = MatchState::default();
    let mut timings: Vec<Vec<f64>> = vec![Vec::new(); solvers.len()];
    let mut reps = vec![0.0; repetitions];

    for s in 0..plan.snapshots {
        let states = plan.config.states_at(plan.time_of(s));
        let costs = build_cost_matrix(&states, &policy, &buffers);
        let sides = SideTable::new(&states);
        chain.s = s as u64;
        if s % stride == offset % stride {
            for (k, &solver) in solvers.iter().enumerate() {
                for r in reps.iter_mut() {
                    let (out, dt) = measure_solver_time(|| solve(solver, plan.transceivers, &costs, &sides, &chain));
                    out?;
                    *r = dt;
                }
                timings[k].push(median(&mut reps));
            }
        }
        let next = solve(SolverKind::Markovian, plan.transceivers, &costs, &sides, &chain)?;
        chain = MatchState::new(next, s as u64);
    }

    Ok(solvers
        .iter()
        .zip(timings)
        .map(|(&solver, mut t)| BenchRow {
            solver,
            samples: t.len(),
            repetitions,
            mean_s: t.iter().sum::<f64>() / t.len().max(1) as f64,
            max_s: t.iter().copied().fold(0.0, f64::max),
            median_s: median(&mut t),
        })
        .collect())
}

pub(crate) fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    }
}

/// One cell of a parameter sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub planes: usize,
    pub sats_per_plane: usize,
    pub eta: f64,
    pub solver: SolverKind,
    pub transceivers: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub point: SweepPoint,
    pub summary: RunSummary,
}

/// Runs every point in order, building each plan with `make_plan`.
pub fn sweep(
    points: &[SweepPoint],
    make_plan: impl Fn(&SweepPoint) -> Result<SimulationPlan>,
) -> Result<Vec<SweepRow>> {
    points
        .iter()
        .map(|point| {
            let plan = make_plan(point)?;
            let summary = run(plan, |_| Ok(()))?;
            Ok(SweepRow { point: *point, summary })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn keys(pairs: &[(usize, usize)]) -> Assignment {
        Assignment::from_pairs(pairs.iter().map(|&(a, b)| Pair::new(a, b, 1.0)).collect())
    }

    #[test]
    fn contact_of_five_snapshots() {
        let mut seq = vec![Assignment::new(); 10];
        for a in &mut seq[3..8] {
            *a = keys(&[(0, 5)]);
        }
        let mut tracker = ContactTracker::new(2.0);
        let transitions: Vec<_> = seq.iter().map(|a| tracker.observe(a)).collect();
        assert_eq!(transitions[8].handovers, 1);
        assert_eq!(transitions.iter().map(|t| t.handovers).sum::<usize>(), 1);
        let stats = tracker.finish();
        assert_eq!(stats.runs, vec![5]);
        assert_eq!(stats.durations_s().collect::<Vec<_>>(), vec![10.0]);
        assert_eq!(stats.handovers, 1);
    }

    #[test]
    fn empty_run_has_no_contacts() {
        let stats = track_contacts(std::iter::empty(), 3.0);
        assert!(stats.runs.is_empty());
        assert_eq!(stats.handovers, 0);
        assert_eq!(stats.mean_contact_s(), None);
        assert_eq!(stats.handover_rate(), 0.0);
    }

    #[test]
    fn rematching_the_same_partner_is_not_a_handover() {
        let seq = [keys(&[(0, 2), (1, 3)]), keys(&[(0, 2), (1, 4)]), keys(&[(0, 2), (1, 4)])];
        let mut tracker = ContactTracker::new(1.0);
        let t: Vec<_> = seq.iter().map(|a| tracker.observe(a)).collect();
        assert_eq!(t[1], Transition { handovers: 1, retained: 1 });
        assert_eq!(t[2], Transition { handovers: 0, retained: 2 });
        let mut runs = tracker.finish().runs;
        runs.sort();
        assert_eq!(runs, vec![1, 2, 3]);
    }

    #[test]
    fn default_sampling_period_for_lowest_plane() {
        let c = ConstellationConfig::walker_delta(5, 40).unwrap();
        let t = default_sampling_period(&c);
        assert!((t - 5.0 * c.lowest_plane_period() / 10_000.0).abs() < 1e-12);
        let plan = SimulationPlan::new("x", c, SolverKind::Greedy, Transceivers::One);
        assert_eq!(plan.snapshots, 10_000);
        assert!(plan.is_replication_scale());
    }

    #[test]
    fn snapshot_count_is_a_ceiling() {
        assert_eq!(snapshots_for(0.0, 3.41), 1);
        assert_eq!(snapshots_for(3.41, 3.41), 1);
        assert_eq!(snapshots_for(3.42, 3.41), 2);
        assert_eq!(snapshots_for(34_100.0, 3.41), 10_000);
    }

    #[test]
    fn unsupported_combinations_fail_before_running() {
        let c = ConstellationConfig::walker_delta(3, 4).unwrap();
        let plan = SimulationPlan::new("x", c.clone(), SolverKind::Hungarian, Transceivers::One);
        assert!(matches!(Simulation::new(plan), Err(Error::Unsupported(_))));
        let c2 = ConstellationConfig::walker_delta(2, 4).unwrap();
        let plan = SimulationPlan::new("x", c2, SolverKind::Hungarian, Transceivers::Two);
        assert!(matches!(Simulation::new(plan), Err(Error::Unsupported(_))));
    }

    #[test]
    fn static_snapshot_markovian_equals_greedy() {
        let c = ConstellationConfig::walker_delta(3, 12).unwrap();
        let outcome = |solver| {
            let plan = SimulationPlan::new("x", c.clone(), solver, Transceivers::One).with_duration(0.0);
            let mut sim = Simulation::new(plan).unwrap();
            let out = sim.step().unwrap().unwrap();
            assert!(sim.step().unwrap().is_none());
            out.assignment
        };
        assert_eq!(outcome(SolverKind::Markovian), outcome(SolverKind::Greedy));
    }

    #[test]
    fn metrics_are_consistent() {
        let c = ConstellationConfig::walker_delta(4, 20).unwrap();
        let mut plan = SimulationPlan::new("x", c, SolverKind::Markovian, Transceivers::Two);
        plan.snapshots = 200;
        let summary = run(plan, |o| {
            let m = &o.metrics;
            assert_eq!(m.pairs, m.low_pairs + m.high_pairs);
            assert!(m.solve_time_s >= 0.0);
            assert_eq!(m.violations, 0);
            if let Some(r) = m.relative_power {
                assert!((1.0..=4.0).contains(&r));
            }
            Ok(())
        })
        .unwrap();
        assert_eq!(summary.snapshots, 200);
        assert!(summary.mean_pairs <= 80.0);
        let r = summary.relative_power.unwrap();
        assert!((1.0..=4.0).contains(&r));
    }

    #[test]
    fn timing_a_no_op_is_nonnegative() {
        let ((), dt) = measure_solver_time(|| ());
        assert!(dt >= 0.0);
    }

    #[test]
    fn median_of_odd_and_even() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}

//! Scenario files.
//!
//! A scenario is a TOML document with the sections `[constellation]`,
//! `[link]`, `[policy]`, `[simulation]`, `[output]` and `[sweep]`. The full
//! grammar is in `docs/scenario-format.md`.

use std::f64::consts::TAU;
use std::fmt;
use std::ops::Range;

use serde::Deserialize;
use toml::Spanned;

use crate::geometry::{ConstellationConfig, OrbitalPlane, EARTH_RADIUS_KM, MU_EARTH_KM3_S2};
use crate::linkbudget::LinkBudgetParams;
use crate::matching::Transceivers;
use crate::sim::{default_sampling_period, snapshots_for, SimulationPlan, SolverKind, SweepPoint};

use super::metrics::Format;

/// A problem with a scenario file, anchored to a line when possible.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct ConfigError {
    /// One-based line of the offending key or value.
    pub line: Option<usize>,
    /// Dotted key path, e.g. `policy.eta`.
    pub key: Option<String>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("scenario")?;
        if let Some(line) = self.line {
            write!(f, ", line {line}")?;
        }
        if let Some(key) = &self.key {
            write!(f, ", `{key}`")?;
        }
        write!(f, ": {}", self.message)
    }
}

impl ConfigError {
    fn new(message: impl Into<String>) -> Self {
        ConfigError { line: None, key: None, message: message.into() }
    }

    fn at(text: &str, key: &str, span: Range<usize>, message: impl Into<String>) -> Self {
        ConfigError { line: Some(line_of(text, span.start)), key: Some(key.to_string()), message: message.into() }
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text.as_bytes()[..offset.min(text.len())].iter().filter(|&&b| b == b'\n').count() + 1
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: Option<Spanned<String>>,
    constellation: Option<RawConstellation>,
    #[serde(default)]
    link: RawLink,
    #[serde(default)]
    policy: RawPolicy,
    simulation: Option<RawSimulation>,
    #[serde(default)]
    output: RawOutput,
    #[serde(default)]
    sweep: RawSweep,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum CountOrList {
    Count(usize),
    List(Vec<usize>),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConstellation {
    planes: Option<Spanned<usize>>,
    satellites_per_plane: Option<Spanned<CountOrList>>,
    altitude_base_km: Option<Spanned<f64>>,
    altitude_step_km: Option<Spanned<f64>>,
    altitudes_km: Option<Spanned<Vec<f64>>>,
    inclinations_rad: Option<Spanned<Vec<f64>>>,
    earth_radius_km: Option<Spanned<f64>>,
    mu_km3_s2: Option<Spanned<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLink {
    frequency_hz: Option<Spanned<f64>>,
    bandwidth_hz: Option<Spanned<f64>>,
    rate_bps: Option<Spanned<f64>>,
    tx_gain: Option<Spanned<f64>>,
    rx_gain: Option<Spanned<f64>>,
    noise_temperature_k: Option<Spanned<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPolicy {
    eta: Option<Spanned<f64>>,
    reference_plane: Option<Spanned<usize>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSimulation {
    solver: Option<Spanned<String>>,
    transceivers: Option<Spanned<u8>>,
    t_start_s: Option<Spanned<f64>>,
    duration_s: Option<Spanned<f64>>,
    snapshots: Option<Spanned<usize>>,
    sampling_period_s: Option<Spanned<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    path: Option<String>,
    format: Option<Spanned<String>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    planes: Option<Spanned<Vec<usize>>>,
    satellites_per_plane: Option<Spanned<Vec<usize>>>,
    eta: Option<Spanned<Vec<f64>>>,
    solvers: Option<Spanned<Vec<String>>>,
    transceivers: Option<Spanned<Vec<u8>>>,
}

/// How plane altitudes are derived.
#[derive(Debug, Clone, PartialEq)]
pub enum AltitudeRule {
    /// `h_m = base + step * m` for one-based `m`.
    Linear {
        base_km: f64,
        step_km: f64,
    },
    Explicit(Vec<f64>),
}

/// How plane orientations are derived.
#[derive(Debug, Clone, PartialEq)]
pub enum OrientationRule {
    /// `2 pi (m - 1) / M` for one-based `m`.
    Walker,
    Explicit(Vec<f64>),
}

/// Constellation section with its rules kept, so sweeps can vary `M` and
/// `N_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstellationSpec {
    pub planes: usize,
    pub satellites: Vec<usize>,
    pub altitudes: AltitudeRule,
    pub orientations: OrientationRule,
    pub earth_radius_km: f64,
    pub mu_km3_s2: f64,
}

impl ConstellationSpec {
    /// Builds the constellation, optionally with a different number of
    /// planes or satellites per plane. Explicit per-plane lists cannot be
    /// resized.
    pub fn build(
        &self,
        planes: Option<usize>,
        sats_per_plane: Option<usize>,
    ) -> Result<ConstellationConfig, ConfigError> {
        let m_count = planes.unwrap_or(self.planes);
        let sats = match sats_per_plane {
            Some(n) => vec![n; m_count],
            None if self.satellites.len() == 1 => vec![self.satellites[0]; m_count],
            None if self.satellites.len() == m_count => self.satellites.clone(),
            None => {
                return Err(ConfigError::new(format!(
                    "`constellation.satellites_per_plane` lists {} planes, not {m_count}",
                    self.satellites.len()
                )))
            }
        };
        let altitudes = match &self.altitudes {
            AltitudeRule::Linear { base_km, step_km } => (1..=m_count).map(|m| base_km + step_km * m as f64).collect(),
            AltitudeRule::Explicit(h) if h.len() == m_count => h.clone(),
            AltitudeRule::Explicit(h) => {
                return Err(ConfigError::new(format!(
                    "`constellation.altitudes_km` lists {} planes, not {m_count}",
                    h.len()
                )))
            }
        };
        let orientations = match &self.orientations {
            OrientationRule::Walker => (0..m_count).map(|m| TAU * m as f64 / m_count as f64).collect(),
            OrientationRule::Explicit(e) if e.len() == m_count => e.clone(),
            OrientationRule::Explicit(e) => {
                return Err(ConfigError::new(format!(
                    "`constellation.inclinations_rad` lists {} planes, not {m_count}",
                    e.len()
                )))
            }
        };
        let planes: Vec<OrbitalPlane> = (0..m_count)
            .map(|m| OrbitalPlane { satellites: sats[m], altitude_km: altitudes[m], orientation_rad: orientations[m] })
            .collect();
        ConstellationConfig::new(planes, self.earth_radius_km, self.mu_km3_s2)
            .map_err(|e| ConfigError::new(e.to_string()))
    }
}

/// How long a run lasts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RunLength {
    /// Five periods of the lowest plane.
    Default,
    DurationS(f64),
    Snapshots(usize),
}

/// Axes of a parameter sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub planes: Vec<usize>,
    pub satellites_per_plane: Vec<usize>,
    pub eta: Vec<f64>,
    pub solvers: Vec<SolverKind>,
    pub transceivers: Vec<Transceivers>,
}

/// A parsed scenario file.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub constellation: ConstellationSpec,
    pub link: LinkBudgetParams,
    pub eta: f64,
    /// One-based as in the file; `None` means the highest plane.
    pub reference_plane: Option<usize>,
    pub solver: SolverKind,
    pub transceivers: Transceivers,
    pub t_start_s: f64,
    pub length: RunLength,
    /// `None` means the default rule.
    pub sampling_period_s: Option<f64>,
    pub output_path: Option<String>,
    pub output_format: Option<Format>,
    pub sweep: SweepSpec,
    /// The plan the file describes.
    pub plan: SimulationPlan,
}

const REQUIRED: [&str; 3] = ["constellation.planes", "constellation.satellites_per_plane", "simulation.solver"];

/// Parses and validates a scenario.
pub fn parse_scenario(text: &str) -> Result<Scenario, ConfigError> {
    let raw: RawScenario = toml::from_str(text).map_err(|e| ConfigError {
        line: e.span().map(|s| line_of(text, s.start)),
        key: None,
        message: e.message().trim().to_string(),
    })?;

    let c = raw.constellation.unwrap_or_default();
    let sim = raw.simulation.unwrap_or_default();
    let missing: Vec<&str> = REQUIRED
        .iter()
        .zip([c.planes.is_none(), c.satellites_per_plane.is_none(), sim.solver.is_none()])
        .filter_map(|(k, m)| m.then_some(*k))
        .collect();
    if !missing.is_empty() {
        return Err(ConfigError::new(format!("missing required keys: {}", missing.join(", "))));
    }

    let positive = |key: &str, v: &Option<Spanned<f64>>, default: f64| -> Result<f64, ConfigError> {
        match v {
            None => Ok(default),
            Some(s) if *s.get_ref() > 0.0 && s.get_ref().is_finite() => Ok(*s.get_ref()),
            Some(s) => Err(ConfigError::at(text, key, s.span(), format!("must be positive, got {}", s.get_ref()))),
        }
    };

    // constellation
    let planes_s = c.planes.unwrap();
    let planes = *planes_s.get_ref();
    if planes < 2 {
        return Err(ConfigError::at(text, "constellation.planes", planes_s.span(), "at least 2 planes are needed"));
    }
    let sats_s = c.satellites_per_plane.unwrap();
    let satellites = match sats_s.get_ref() {
        CountOrList::Count(n) => vec![*n],
        CountOrList::List(v) if v.len() == planes => v.clone(),
        CountOrList::List(v) => {
            return Err(ConfigError::at(
                text,
                "constellation.satellites_per_plane",
                sats_s.span(),
                format!("lists {} planes but `constellation.planes` is {planes}", v.len()),
            ))
        }
    };
    if satellites.contains(&0) {
        return Err(ConfigError::at(
            text,
            "constellation.satellites_per_plane",
            sats_s.span(),
            "every plane needs a satellite",
        ));
    }
    let altitudes = match (&c.altitudes_km, &c.altitude_base_km, &c.altitude_step_km) {
        (Some(list), None, None) => {
            let h = list.get_ref();
            if h.len() != planes {
                return Err(ConfigError::at(
                    text,
                    "constellation.altitudes_km",
                    list.span(),
                    format!("lists {} planes but `constellation.planes` is {planes}", h.len()),
                ));
            }
            if let Some(bad) = h.iter().find(|&&x| !(x > 0.0) || !x.is_finite()) {
                return Err(ConfigError::at(
                    text,
                    "constellation.altitudes_km",
                    list.span(),
                    format!("altitudes must be positive, got {bad}"),
                ));
            }
            AltitudeRule::Explicit(h.clone())
        }
        (Some(list), _, _) => {
            return Err(ConfigError::at(
                text,
                "constellation.altitudes_km",
                list.span(),
                "give either an explicit list or `altitude_base_km`/`altitude_step_km`, not both",
            ))
        }
        (None, base, step) => {
            let base_km = base.as_ref().map_or(900.0, |s| *s.get_ref());
            let step_km = step.as_ref().map_or(100.0, |s| *s.get_ref());
            if !base_km.is_finite() || !step_km.is_finite() {
                return Err(ConfigError::new("altitude rule must be finite"));
            }
            let lowest = (base_km + step_km).min(base_km + step_km * planes as f64);
            if !(lowest > 0.0) {
                let (key, span) = match (base, step) {
                    (Some(b), _) => ("constellation.altitude_base_km", b.span()),
                    (None, Some(s)) => ("constellation.altitude_step_km", s.span()),
                    (None, None) => unreachable!("the default rule is positive"),
                };
                return Err(ConfigError::at(
                    text,
                    key,
                    span,
                    format!("rule gives a non-positive altitude ({lowest} km)"),
                ));
            }
            AltitudeRule::Linear { base_km, step_km }
        }
    };
    let orientations = match &c.inclinations_rad {
        None => OrientationRule::Walker,
        Some(list) if list.get_ref().len() != planes => {
            return Err(ConfigError::at(
                text,
                "constellation.inclinations_rad",
                list.span(),
                format!("lists {} planes but `constellation.planes` is {planes}", list.get_ref().len()),
            ))
        }
        Some(list) if list.get_ref().iter().any(|e| !e.is_finite()) => {
            return Err(ConfigError::at(text, "constellation.inclinations_rad", list.span(), "must be finite"))
        }
        Some(list) => OrientationRule::Explicit(list.get_ref().clone()),
    };
    let constellation = ConstellationSpec {
        planes,
        satellites,
        altitudes,
        orientations,
        earth_radius_km: positive("constellation.earth_radius_km", &c.earth_radius_km, EARTH_RADIUS_KM)?,
        mu_km3_s2: positive("constellation.mu_km3_s2", &c.mu_km3_s2, MU_EARTH_KM3_S2)?,
    };
    let config = constellation.build(None, None)?;

    // link budget
    let d = LinkBudgetParams::default();
    let l = &raw.link;
    let link = LinkBudgetParams {
        frequency_hz: positive("link.frequency_hz", &l.frequency_hz, d.frequency_hz)?,
        bandwidth_hz: positive("link.bandwidth_hz", &l.bandwidth_hz, d.bandwidth_hz)?,
        rate_bps: positive("link.rate_bps", &l.rate_bps, d.rate_bps)?,
        tx_gain: positive("link.tx_gain", &l.tx_gain, d.tx_gain)?,
        rx_gain: positive("link.rx_gain", &l.rx_gain, d.rx_gain)?,
        noise_temp_k: positive("link.noise_temperature_k", &l.noise_temperature_k, d.noise_temp_k)?,
        ..d
    };

    // policy
    let eta = positive("policy.eta", &raw.policy.eta, 1.0)?;
    let reference_plane = match &raw.policy.reference_plane {
        None => None,
        Some(s) if (1..=planes).contains(s.get_ref()) => Some(*s.get_ref()),
        Some(s) => {
            return Err(ConfigError::at(
                text,
                "policy.reference_plane",
                s.span(),
                format!("must be between 1 and {planes}, got {}", s.get_ref()),
            ))
        }
    };

    // simulation
    let solver_s = sim.solver.unwrap();
    let solver: SolverKind = solver_s
        .get_ref()
        .parse()
        .map_err(|e: String| ConfigError::at(text, "simulation.solver", solver_s.span(), e))?;
    let transceivers = match &sim.transceivers {
        None => Transceivers::One,
        Some(s) => Transceivers::from_count(*s.get_ref()).ok_or_else(|| {
            ConfigError::at(text, "simulation.transceivers", s.span(), format!("must be 1 or 2, got {}", s.get_ref()))
        })?,
    };
    if let Err(e) = solver.check_supported(transceivers, planes) {
        return Err(ConfigError::at(text, "simulation.solver", solver_s.span(), e.to_string()));
    }
    let t_start_s = match &sim.t_start_s {
        None => 0.0,
        Some(s) if s.get_ref().is_finite() => *s.get_ref(),
        Some(s) => return Err(ConfigError::at(text, "simulation.t_start_s", s.span(), "must be finite")),
    };
    let sampling_period_s = match &sim.sampling_period_s {
        None => None,
        some => Some(positive("simulation.sampling_period_s", some, 0.0)?),
    };
    let length = match (&sim.duration_s, &sim.snapshots) {
        (Some(_), Some(s)) => {
            return Err(ConfigError::at(
                text,
                "simulation.snapshots",
                s.span(),
                "give either `duration_s` or `snapshots`, not both",
            ))
        }
        (Some(d), None) if *d.get_ref() >= 0.0 && d.get_ref().is_finite() => RunLength::DurationS(*d.get_ref()),
        (Some(d), None) => {
            return Err(ConfigError::at(
                text,
                "simulation.duration_s",
                d.span(),
                format!("must be non-negative, got {}", d.get_ref()),
            ))
        }
        (None, Some(s)) if *s.get_ref() >= 1 => RunLength::Snapshots(*s.get_ref()),
        (None, Some(s)) => return Err(ConfigError::at(text, "simulation.snapshots", s.span(), "must be at least 1")),
        (None, None) => RunLength::Default,
    };

    // output
    let output_format = match &raw.output.format {
        None => None,
        Some(s) => Some(s.get_ref().parse().map_err(|e: String| ConfigError::at(text, "output.format", s.span(), e))?),
    };

    // sweep
    let sw = &raw.sweep;
    let list_or =
        |key: &str, v: &Option<Spanned<Vec<usize>>>, default: usize, min: usize| -> Result<Vec<usize>, ConfigError> {
            match v {
                None => Ok(vec![default]),
                Some(s) if s.get_ref().is_empty() => Err(ConfigError::at(text, key, s.span(), "must not be empty")),
                Some(s) if s.get_ref().iter().any(|&x| x < min) => {
                    Err(ConfigError::at(text, key, s.span(), format!("values must be at least {min}")))
                }
                Some(s) => Ok(s.get_ref().clone()),
            }
        };
    let sweep_eta = match &sw.eta {
        None => vec![eta],
        Some(s) if !s.get_ref().is_empty() && s.get_ref().iter().all(|&e| e > 0.0 && e.is_finite()) => {
            s.get_ref().clone()
        }
        Some(s) => {
            return Err(ConfigError::at(text, "sweep.eta", s.span(), "must be a non-empty list of positive values"))
        }
    };
    let sweep_solvers = match &sw.solvers {
        None => vec![solver],
        Some(s) if s.get_ref().is_empty() => {
            return Err(ConfigError::at(text, "sweep.solvers", s.span(), "must not be empty"))
        }
        Some(s) => s
            .get_ref()
            .iter()
            .map(|x| x.parse())
            .collect::<Result<_, String>>()
            .map_err(|e| ConfigError::at(text, "sweep.solvers", s.span(), e))?,
    };
    let sweep_trx = match &sw.transceivers {
        None => vec![transceivers],
        Some(s) => {
            let v: Option<Vec<_>> = s.get_ref().iter().map(|&n| Transceivers::from_count(n)).collect();
            match v {
                Some(v) if !v.is_empty() => v,
                _ => return Err(ConfigError::at(text, "sweep.transceivers", s.span(), "must list 1 and/or 2")),
            }
        }
    };
    let sweep = SweepSpec {
        planes: list_or("sweep.planes", &sw.planes, planes, 2)?,
        satellites_per_plane: list_or(
            "sweep.satellites_per_plane",
            &sw.satellites_per_plane,
            constellation.satellites[0],
            1,
        )?,
        eta: sweep_eta,
        solvers: sweep_solvers,
        transceivers: sweep_trx,
    };

    let name = raw.name.map_or_else(|| "scenario".to_string(), |s| s.into_inner());
    let mut scenario = Scenario {
        name: name.clone(),
        constellation,
        link,
        eta,
        reference_plane,
        solver,
        transceivers,
        t_start_s,
        length,
        sampling_period_s,
        output_path: raw.output.path,
        output_format,
        sweep,
        plan: SimulationPlan::new(name, config.clone(), solver, transceivers),
    };
    scenario.plan = scenario.make_plan(config, solver, transceivers, eta)?;
    Ok(scenario)
}

impl Scenario {
    fn make_plan(
        &self,
        config: ConstellationConfig,
        solver: SolverKind,
        transceivers: Transceivers,
        eta: f64,
    ) -> Result<SimulationPlan, ConfigError> {
        let sampling = self.sampling_period_s.unwrap_or_else(|| default_sampling_period(&config));
        let snapshots = match self.length {
            RunLength::Default => snapshots_for(5.0 * config.lowest_plane_period(), sampling),
            RunLength::DurationS(d) => snapshots_for(d, sampling),
            RunLength::Snapshots(n) => n,
        };
        let reference_plane = match self.reference_plane {
            Some(m) if m <= config.num_planes() => m - 1,
            Some(m) => {
                return Err(ConfigError::new(format!(
                    "`policy.reference_plane` {m} does not exist with {} planes",
                    config.num_planes()
                )))
            }
            None => config.num_planes() - 1,
        };
        let mut plan = SimulationPlan::new(self.name.clone(), config, solver, transceivers);
        plan.link = self.link;
        plan.eta = eta;
        plan.reference_plane = reference_plane;
        plan.t_start_s = self.t_start_s;
        plan.sampling_period_s = sampling;
        plan.snapshots = snapshots;
        plan.validate().map_err(|e| ConfigError::new(e.to_string()))?;
        Ok(plan)
    }

    /// Every combination of the sweep axes, in a fixed order: planes, then
    /// satellites per plane, eta, transceivers, solver. Combinations a solver
    /// cannot handle are skipped.
    pub fn sweep_points(&self) -> Vec<SweepPoint> {
        let s = &self.sweep;
        let mut points = Vec::new();
        for &planes in &s.planes {
            for &sats_per_plane in &s.satellites_per_plane {
                for &eta in &s.eta {
                    for &trx in &s.transceivers {
                        for &solver in &s.solvers {
                            if solver.check_supported(trx, planes).is_ok() {
                                points.push(SweepPoint {
                                    planes,
                                    sats_per_plane,
                                    eta,
                                    solver,
                                    transceivers: trx.count(),
                                });
                            }
                        }
                    }
                }
            }
        }
        points
    }

    /// The plan for one sweep point. The run id encodes the point.
    pub fn plan_for(&self, p: &SweepPoint) -> Result<SimulationPlan, ConfigError> {
        let sats = (p.sats_per_plane != self.constellation.satellites[0] || self.constellation.satellites.len() == 1)
            .then_some(p.sats_per_plane);
        let planes = (p.planes != self.constellation.planes).then_some(p.planes);
        let config = self.constellation.build(planes, sats)?;
        let trx = Transceivers::from_count(p.transceivers)
            .ok_or_else(|| ConfigError::new(format!("invalid transceiver count {}", p.transceivers)))?;
        let mut plan = self.make_plan(config, p.solver, trx, p.eta)?;
        plan.name = format!(
            "{}/M{}-N{}-eta{}-{}-{}trx",
            self.name, p.planes, p.sats_per_plane, p.eta, p.solver, p.transceivers
        );
        Ok(plan)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str =
        "[constellation]\nplanes = 3\nsatellites_per_plane = 10\n\n[simulation]\nsolver = \"greedy\"\n";

    #[test]
    fn minimal_file_gets_defaults() {
        let s = parse_scenario(MINIMAL).unwrap();
        let plan = &s.plan;
        assert_eq!(plan.config.num_planes(), 3);
        assert_eq!(plan.config.total_satellites(), 30);
        assert_eq!(plan.config.plane(0).altitude_km, 1000.0);
        assert_eq!(plan.config.plane(2).altitude_km, 1200.0);
        assert_eq!(plan.eta, 1.0);
        assert_eq!(plan.reference_plane, 2);
        assert_eq!(plan.transceivers, Transceivers::One);
        assert_eq!(plan.snapshots, 10_000);
        assert_eq!(plan.link, LinkBudgetParams::default());
    }

    #[test]
    fn same_text_same_plan() {
        assert_eq!(parse_scenario(MINIMAL).unwrap(), parse_scenario(MINIMAL).unwrap());
    }

    #[test]
    fn empty_file_lists_required_keys() {
        let e = parse_scenario("").unwrap_err();
        for key in REQUIRED {
            assert!(e.message.contains(key), "{e}");
        }
    }

    #[test]
    fn zero_eta_is_rejected_at_its_line() {
        let text = format!("{MINIMAL}\n[policy]\neta = 0.0\n");
        let e = parse_scenario(&text).unwrap_err();
        assert_eq!(e.key.as_deref(), Some("policy.eta"));
        assert_eq!(e.line, Some(9));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = MINIMAL.replace("planes = 3", "planes = 3\ncolour = \"red\"");
        let e = parse_scenario(&text).unwrap_err();
        assert!(e.message.contains("colour"), "{e}");
        assert_eq!(e.line, Some(3));
        assert!(parse_scenario(&format!("{MINIMAL}[extra]\n")).is_err());
    }

    #[test]
    fn syntax_errors_have_lines() {
        let e = parse_scenario("[constellation]\nplanes = = 3\n").unwrap_err();
        assert_eq!(e.line, Some(2));
    }

    #[test]
    fn hungarian_needs_two_planes() {
        let e = parse_scenario(&MINIMAL.replace("greedy", "hungarian")).unwrap_err();
        assert_eq!(e.key.as_deref(), Some("simulation.solver"));
    }

    #[test]
    fn duration_and_snapshots_are_exclusive() {
        let text = format!("{MINIMAL}duration_s = 10.0\nsnapshots = 4\n");
        assert!(parse_scenario(&text).is_err());
        let text = format!("{MINIMAL}duration_s = 10.0\nsampling_period_s = 3.0\n");
        let s = parse_scenario(&text).unwrap();
        assert_eq!(s.plan.snapshots, 4);
        assert_eq!(s.plan.sampling_period_s, 3.0);
    }

    #[test]
    fn explicit_lists() {
        let text = "[constellation]\nplanes = 2\nsatellites_per_plane = [3, 5]\naltitudes_km = [500.0, 700.0]\ninclinations_rad = [0.1, 1.2]\n[simulation]\nsolver = \"hungarian\"\n";
        let s = parse_scenario(text).unwrap();
        let c = &s.plan.config;
        assert_eq!(c.plane(1).satellites, 5);
        assert_eq!(c.plane(1).altitude_km, 700.0);
        assert_eq!(c.plane(0).orientation_rad, 0.1);
        let bad = text.replace("[500.0, 700.0]", "[500.0]");
        assert_eq!(parse_scenario(&bad).unwrap_err().key.as_deref(), Some("constellation.altitudes_km"));
    }

    #[test]
    fn sweep_points_and_plans() {
        let text = format!(
            "{MINIMAL}\n[sweep]\nplanes = [2, 3]\nsolvers = [\"hungarian\", \"markovian\"]\ntransceivers = [1, 2]\n"
        );
        let s = parse_scenario(&text).unwrap();
        let points = s.sweep_points();
        // hungarian only at M = 2 with one transceiver
        assert_eq!(points.len(), 5);
        for p in &points {
            let plan = s.plan_for(p).unwrap();
            assert_eq!(plan.config.num_planes(), p.planes);
            assert_eq!(plan.reference_plane, p.planes - 1);
        }
    }
}

//! Free-space link budget, the two-level power policy and the matching cost
//! matrix built from them.
//!
//! Distances enter in kilometres and are converted to metres only where the
//! path loss needs SI units.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{slant_range_parts, ConstellationConfig, SatelliteState};

pub const BOLTZMANN_J_PER_K: f64 = 1.380_649e-23;
pub const SPEED_OF_LIGHT_M_S: f64 = 299_792_458.0;

/// Radio parameters held fixed while the transmit power adapts.
///
/// The defaults (2.4 GHz, 1 MHz, 1 Mbit/s, unit gains, 290 K) are placeholders:
/// relative power, pair counts and timings do not depend on them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudgetParams {
    pub frequency_hz: f64,
    pub bandwidth_hz: f64,
    pub rate_bps: f64,
    pub tx_gain: f64,
    pub rx_gain: f64,
    pub noise_temp_k: f64,
    pub boltzmann_j_per_k: f64,
    pub speed_of_light_m_s: f64,
}

impl Default for LinkBudgetParams {
    fn default() -> Self {
        LinkBudgetParams {
            frequency_hz: 2.4e9,
            bandwidth_hz: 1e6,
            rate_bps: 1e6,
            tx_gain: 1.0,
            rx_gain: 1.0,
            noise_temp_k: 290.0,
            boltzmann_j_per_k: BOLTZMANN_J_PER_K,
            speed_of_light_m_s: SPEED_OF_LIGHT_M_S,
        }
    }
}

impl LinkBudgetParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("frequency must be positive", self.frequency_hz),
            ("bandwidth must be positive", self.bandwidth_hz),
            ("data rate must be positive", self.rate_bps),
            ("transmit gain must be positive", self.tx_gain),
            ("receive gain must be positive", self.rx_gain),
            ("noise temperature must be positive", self.noise_temp_k),
            ("Boltzmann constant must be positive", self.boltzmann_j_per_k),
            ("speed of light must be positive", self.speed_of_light_m_s),
        ];
        for (what, value) in fields {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::domain(what, value));
            }
        }
        Ok(())
    }

    /// `(2^(R/B) - 1)`, the SNR needed to reach the target rate.
    pub fn required_snr(&self) -> f64 {
        (self.rate_bps / self.bandwidth_hz).exp2() - 1.0
    }
}

/// Free-space path loss `(4 pi l f / c)^2` as a linear factor.
pub fn path_loss(distance_km: f64, frequency_hz: f64, speed_of_light_m_s: f64) -> Result<f64> {
    if !(distance_km > 0.0) {
        return Err(Error::domain("link distance must be positive", distance_km));
    }
    let x = 4.0 * PI * distance_km * 1e3 * frequency_hz / speed_of_light_m_s;
    Ok(x * x)
}

/// Received SNR for transmit power `tx_power_w` over `distance_km`. The data
/// rate appears in the noise term.
pub fn snr(tx_power_w: f64, distance_km: f64, p: &LinkBudgetParams) -> Result<f64> {
    let loss = path_loss(distance_km, p.frequency_hz, p.speed_of_light_m_s)?;
    Ok(tx_power_w * p.tx_gain * p.rx_gain / (p.boltzmann_j_per_k * p.noise_temp_k * p.rate_bps * loss))
}

/// Shannon capacity `B log2(1 + snr)`, bit/s.
pub fn shannon_capacity(snr: f64, bandwidth_hz: f64) -> f64 {
    bandwidth_hz * snr.ln_1p() / std::f64::consts::LN_2
}

/// Minimum transmit power reaching the target rate over `distance_km`, W.
pub fn min_power(distance_km: f64, p: &LinkBudgetParams) -> Result<f64> {
    let loss = path_loss(distance_km, p.frequency_hz, p.speed_of_light_m_s)?;
    Ok(p.required_snr() * p.boltzmann_j_per_k * p.noise_temp_k * p.rate_bps / (p.tx_gain * p.rx_gain) * loss)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PowerLevel {
    Low,
    High,
}

/// Two-level power adaptation: `P_low` up to `l_low = eta * l_intra(ref)`,
/// `P_high` up to `l_high = 2 l_low`, no link beyond.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerPolicy {
    pub eta: f64,
    pub reference_plane: usize,
    pub l_low_km: f64,
    pub l_high_km: f64,
    pub p_low_w: f64,
    pub p_high_w: f64,
}

impl PowerPolicy {
    /// Builds the policy with ranges scaled from the neighbour distance of
    /// `reference_plane` (zero-based).
    pub fn new(
        config: &ConstellationConfig,
        params: &LinkBudgetParams,
        eta: f64,
        reference_plane: usize,
    ) -> Result<Self> {
        if reference_plane >= config.num_planes() {
            return Err(Error::Unsupported(format!(
                "reference plane {} does not exist ({} planes)",
                reference_plane + 1,
                config.num_planes()
            )));
        }
        let l_intra = config.slant_range_intra(reference_plane)?;
        Self::from_intra_range(l_intra, params, eta, reference_plane)
    }

    pub fn from_intra_range(
        l_intra_km: f64,
        params: &LinkBudgetParams,
        eta: f64,
        reference_plane: usize,
    ) -> Result<Self> {
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(Error::domain("range multiplier eta must be positive", eta));
        }
        params.validate()?;
        let l_low_km = eta * l_intra_km;
        let l_high_km = 2.0 * l_low_km;
        Ok(PowerPolicy {
            eta,
            reference_plane,
            l_low_km,
            l_high_km,
            p_low_w: min_power(l_low_km, params)?,
            p_high_w: min_power(l_high_km, params)?,
        })
    }

    /// Level needed at `distance_km`; `None` when out of range. Both upper
    /// bounds are inclusive.
    pub fn select(&self, distance_km: f64) -> Option<PowerLevel> {
        if distance_km <= self.l_low_km {
            Some(PowerLevel::Low)
        } else if distance_km <= self.l_high_km {
            Some(PowerLevel::High)
        } else {
            None
        }
    }

    pub fn power(&self, level: PowerLevel) -> f64 {
        match level {
            PowerLevel::Low => self.p_low_w,
            PowerLevel::High => self.p_high_w,
        }
    }

    /// Classifies a finite matrix cost.
    pub fn level_of_cost(&self, cost_w: f64) -> PowerLevel {
        if cost_w <= self.p_low_w {
            PowerLevel::Low
        } else {
            PowerLevel::High
        }
    }
}

/// Stored value of a missing edge. Never used in arithmetic.
pub const UNREACHABLE: f64 = f64::INFINITY;

/// Symmetric `n x n` edge costs with unreachable entries on every
/// intra-plane block.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    n: usize,
    w: Vec<f64>,
    plane: Vec<usize>,
    /// Finite columns of each row, ascending.
    adj: Vec<Vec<usize>>,
}

impl CostMatrix {
    /// All-unreachable matrix for satellites with the given plane indices.
    pub fn unreachable(plane: Vec<usize>) -> Self {
        let n = plane.len();
        CostMatrix { n, w: vec![UNREACHABLE; n * n], plane, adj: vec![Vec::new(); n] }
    }

    /// Fills every inter-plane pair `i < j` from `cost(i, j)`.
    pub fn from_fn(plane: Vec<usize>, mut cost: impl FnMut(usize, usize) -> Option<f64>) -> Self {
        let mut m = Self::unreachable(plane);
        for i in 0..m.n {
            for j in i + 1..m.n {
                if m.plane[i] != m.plane[j] {
                    if let Some(c) = cost(i, j) {
                        m.set(i, j, c);
                    }
                }
            }
        }
        m
    }

    /// Sets both `(i, j)` and `(j, i)`. Intra-plane pairs stay unreachable.
    pub fn set(&mut self, i: usize, j: usize, cost: f64) {
        assert!(cost.is_finite() && cost >= 0.0, "cost must be finite and nonnegative");
        if self.plane[i] == self.plane[j] {
            return;
        }
        self.w[i * self.n + j] = cost;
        self.w[j * self.n + i] = cost;
        for (a, b) in [(i, j), (j, i)] {
            if let Err(k) = self.adj[a].binary_search(&b) {
                self.adj[a].insert(k, b);
            }
        }
    }

    pub fn clear(&mut self, i: usize, j: usize) {
        self.w[i * self.n + j] = UNREACHABLE;
        self.w[j * self.n + i] = UNREACHABLE;
        for (a, b) in [(i, j), (j, i)] {
            if let Ok(k) = self.adj[a].binary_search(&b) {
                self.adj[a].remove(k);
            }
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        let w = self.w[i * self.n + j];
        w.is_finite().then_some(w)
    }

    #[inline]
    pub(crate) fn raw(&self, i: usize, j: usize) -> f64 {
        self.w[i * self.n + j]
    }

    #[inline]
    pub(crate) fn row(&self, i: usize) -> &[f64] {
        &self.w[i * self.n..(i + 1) * self.n]
    }

    /// Columns with a finite entry in row `i`, ascending.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    pub fn plane_of(&self, i: usize) -> usize {
        self.plane[i]
    }

    pub fn planes(&self) -> &[usize] {
        &self.plane
    }

    pub fn num_planes(&self) -> usize {
        self.plane.iter().max().map_or(0, |m| m + 1)
    }

    /// Finite edges `(i, j, cost)` with `i < j`, in row-major order.
    pub fn finite_edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            let row = self.row(i);
            self.adj[i].iter().filter(move |&&j| j > i).map(move |&j| (i, j, row[j]))
        })
    }

    /// Checks symmetry and the unreachable intra-plane blocks.
    pub fn check_structure(&self) -> std::result::Result<(), String> {
        for i in 0..self.n {
            for j in 0..self.n {
                let (a, b) = (self.raw(i, j), self.raw(j, i));
                if a.to_bits() != b.to_bits() {
                    return Err(format!("asymmetric entry ({i}, {j}): {a} vs {b}"));
                }
                if self.plane[i] == self.plane[j] && a.is_finite() {
                    return Err(format!("intra-plane entry ({i}, {j}) is finite"));
                }
                if a.is_finite() != self.adj[i].binary_search(&j).is_ok() {
                    return Err(format!("neighbour list of {i} disagrees at {j}"));
                }
            }
        }
        Ok(())
    }
}

/// Cost matrix for one snapshot: `w_ij = P_ij` when both transmit buffers
/// are nonempty and the pair is in range, unreachable otherwise.
///
/// `states` must be all satellites at one common time in global index order.
pub fn build_cost_matrix(states: &[SatelliteState], policy: &PowerPolicy, buffer_nonempty: &[bool]) -> CostMatrix {
    assert_eq!(states.len(), buffer_nonempty.len());
    let plane: Vec<usize> = states.iter().map(|s| s.plane).collect();
    let mut m = CostMatrix::unreachable(plane);
    let n = states.len();

    let trig: Vec<(f64, f64)> = states.iter().map(|s| s.theta.sin_cos()).collect();
    let num_planes = m.num_planes();
    let mut orientation = vec![0.0; num_planes];
    for s in states {
        orientation[s.plane] = s.orientation_rad;
    }
    let sep: Vec<(f64, f64)> = (0..num_planes * num_planes)
        .map(|k| {
            let d = orientation[k / num_planes] - orientation[k % num_planes];
            let half = (0.5 * d).sin();
            (d.cos(), half * half)
        })
        .collect();

    // Cheap screen before the precise range: the literal law of cosines is
    // accurate to ~1e-8 km^2 at orbital radii, far inside this margin.
    let screen = policy.l_high_km * policy.l_high_km * (1.0 + 1e-9) + 1e-6;

    for i in 0..n {
        if !buffer_nonempty[i] {
            continue;
        }
        let a = &states[i];
        let (sa, ca) = trig[i];
        for j in i + 1..n {
            let b = &states[j];
            if a.plane == b.plane || !buffer_nonempty[j] {
                continue;
            }
            let (sb, cb) = trig[j];
            let (cos_sep, sin2_half_sep) = sep[a.plane * num_planes + b.plane];
            let (ra, rb) = (a.radius_km, b.radius_km);
            let approx = ra * ra + rb * rb - 2.0 * ra * rb * (ca * cb + cos_sep * sa * sb);
            if approx > screen {
                continue;
            }
            let l = slant_range_parts(ra, a.theta, rb, b.theta, sin2_half_sep);
            if let Some(level) = policy.select(l) {
                m.set(i, j, policy.power(level));
            }
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::slant_range;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn path_loss_unit_argument() {
        let f = 2.4e9;
        let l_km = SPEED_OF_LIGHT_M_S / (4.0 * PI * f) / 1e3;
        assert!((path_loss(l_km, f, SPEED_OF_LIGHT_M_S).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn path_loss_thousand_km_in_db() {
        let loss = path_loss(1000.0, 2.4e9, 2.998e8).unwrap();
        let direct = (4.0 * PI * 1e6 * 2.4e9 / 2.998e8).powi(2);
        assert!(rel(loss, direct) < 1e-14);
        assert!((10.0 * loss.log10() - 160.05).abs() < 0.01);
    }

    #[test]
    fn path_loss_quadratic_and_domain() {
        let a = path_loss(700.0, 2.4e9, SPEED_OF_LIGHT_M_S).unwrap();
        let b = path_loss(1400.0, 2.4e9, SPEED_OF_LIGHT_M_S).unwrap();
        assert_eq!(b, 4.0 * a);
        assert!(path_loss(0.0, 2.4e9, SPEED_OF_LIGHT_M_S).is_err());
        assert!(path_loss(-1.0, 2.4e9, SPEED_OF_LIGHT_M_S).is_err());
    }

    #[test]
    fn min_power_one_bit_per_hz() {
        let p = LinkBudgetParams::default();
        assert_eq!(p.rate_bps, p.bandwidth_hz);
        let loss = path_loss(900.0, p.frequency_hz, p.speed_of_light_m_s).unwrap();
        let expected = p.boltzmann_j_per_k * p.noise_temp_k * p.rate_bps * loss / (p.tx_gain * p.rx_gain);
        assert!(rel(min_power(900.0, &p).unwrap(), expected) < 1e-14);
    }

    #[test]
    fn min_power_quadratic_and_round_trip() {
        let p = LinkBudgetParams { rate_bps: 3.5e6, tx_gain: 10.0, ..LinkBudgetParams::default() };
        let a = min_power(800.0, &p).unwrap();
        assert_eq!(min_power(1600.0, &p).unwrap(), 4.0 * a);
        let s = snr(a, 800.0, &p).unwrap();
        assert!(rel(shannon_capacity(s, p.bandwidth_hz), p.rate_bps) < 1e-9);
    }

    fn policy() -> PowerPolicy {
        PowerPolicy::from_intra_range(1000.0, &LinkBudgetParams::default(), 1.0, 0).unwrap()
    }

    #[test]
    fn power_levels_are_exactly_four_apart() {
        let p = policy();
        assert_eq!(p.l_high_km, 2.0 * p.l_low_km);
        assert_eq!(p.p_high_w, 4.0 * p.p_low_w);
    }

    #[test]
    fn select_power_boundaries() {
        let p = policy();
        assert_eq!(p.select(p.l_low_km), Some(PowerLevel::Low));
        assert_eq!(p.select(p.l_low_km * (1.0 + 1e-12)), Some(PowerLevel::High));
        assert_eq!(p.select(p.l_high_km), Some(PowerLevel::High));
        assert_eq!(p.select(p.l_high_km + 1.0), None);
    }

    #[test]
    fn eta_must_be_positive() {
        let params = LinkBudgetParams::default();
        assert!(PowerPolicy::from_intra_range(1000.0, &params, 0.0, 0).is_err());
        assert!(PowerPolicy::from_intra_range(1000.0, &params, -1.0, 0).is_err());
    }

    #[test]
    fn reference_plane_range_equals_intra_range() {
        let c = ConstellationConfig::walker_delta(5, 40).unwrap();
        let p = PowerPolicy::new(&c, &LinkBudgetParams::default(), 1.0, 4).unwrap();
        assert_eq!(p.l_low_km, c.slant_range_intra(4).unwrap());
        assert!(PowerPolicy::new(&c, &LinkBudgetParams::default(), 1.0, 5).is_err());
    }

    fn state(id: usize, plane: usize, theta: f64, r: f64, eps: f64) -> SatelliteState {
        SatelliteState {
            id,
            plane,
            theta,
            radius_km: r,
            orientation_rad: eps,
            pos: crate::geometry::position_on_circle(r, eps, theta),
        }
    }

    #[test]
    fn same_plane_pair_is_unreachable() {
        let s = [state(0, 0, 0.0, 7371.0, 0.0), state(1, 0, 0.01, 7371.0, 0.0)];
        let m = build_cost_matrix(&s, &policy(), &[true, true]);
        assert_eq!(m.get(0, 1), None);
        assert_eq!(m.get(1, 0), None);
    }

    #[test]
    fn close_inter_plane_pair_costs_low_power() {
        let s = [state(0, 0, 0.3, 7371.0, 0.0), state(1, 1, 0.3, 7471.0, 0.2)];
        let l = slant_range(&s[0], &s[1]);
        let p = policy();
        assert!(l < p.l_low_km);
        let m = build_cost_matrix(&s, &p, &[true, true]);
        assert_eq!(m.get(0, 1), Some(p.p_low_w));
        assert_eq!(m.get(1, 0), Some(p.p_low_w));
    }

    #[test]
    fn empty_buffer_blocks_the_pair() {
        let s = [state(0, 0, 0.3, 7371.0, 0.0), state(1, 1, 0.3, 7471.0, 0.2)];
        let m = build_cost_matrix(&s, &policy(), &[true, false]);
        assert_eq!(m.get(0, 1), None);
        assert_eq!(m.get(1, 0), None);
    }

    #[test]
    fn matrix_structure_on_evaluation_constellation() {
        let c = ConstellationConfig::walker_delta(5, 40).unwrap();
        let p = PowerPolicy::new(&c, &LinkBudgetParams::default(), 1.0, 4).unwrap();
        let states = c.states_at(1234.5);
        let m = build_cost_matrix(&states, &p, &vec![true; states.len()]);
        m.check_structure().unwrap();
        for i in 0..states.len() {
            for j in 0..states.len() {
                let expected = if states[i].plane == states[j].plane || i == j {
                    None
                } else {
                    p.select(slant_range(&states[i], &states[j])).map(|lv| p.power(lv))
                };
                assert_eq!(m.get(i, j), expected, "({i}, {j})");
            }
        }
        assert!(m.finite_edges().count() > 0);
    }
}

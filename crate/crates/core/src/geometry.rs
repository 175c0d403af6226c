//! Circular-orbit propagation for a multi-plane constellation.
//!
//! Every plane is a circle of radius `r_E + h_m` centred on the Earth. A plane
//! is oriented by a single angle `epsilon_m` that tilts it about the ECI x-axis,
//! so that a satellite at orbital angle `theta` sits at
//!
//! ```text
//! x = r cos(theta)
//! y = r cos(epsilon) sin(theta)
//! z = r sin(epsilon) sin(theta)
//! ```
//!
//! All planes share the same phase origin at `t = 0`; satellite `i` of a plane
//! with `N_m` satellites starts at `2 pi i / N_m`. Units are kilometres and
//! seconds. Satellite and plane indices are zero-based.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mean Earth radius, km.
pub const EARTH_RADIUS_KM: f64 = 6371.0;

/// Earth's standard gravitational parameter, km^3/s^2.
pub const MU_EARTH_KM3_S2: f64 = 398_600.441_8;

/// A point (or displacement) in the Earth-centred inertial frame, km.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eci {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Eci {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Eci { x, y, z }
    }

    pub fn dot(self, other: Eci) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn distance(self, other: Eci) -> f64 {
        (self - other).norm()
    }
}

impl std::ops::Sub for Eci {
    type Output = Eci;

    fn sub(self, other: Eci) -> Eci {
        Eci::new(self.x - other.x, self.y - other.y, self.z - other.z)
    }
}

/// One circular orbital plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitalPlane {
    pub satellites: usize,
    pub altitude_km: f64,
    /// Tilt of the plane about the ECI x-axis, radians. Values outside
    /// `[0, pi]` are accepted and act as plane orientations.
    pub orientation_rad: f64,
}

/// Static description of the constellation.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstellationConfig {
    planes: Vec<OrbitalPlane>,
    earth_radius_km: f64,
    mu_km3_s2: f64,
    /// Global index of the first satellite of each plane, plus the total.
    offsets: Vec<usize>,
    periods: OrbitalPeriodTable,
}

impl ConstellationConfig {
    pub fn new(planes: Vec<OrbitalPlane>, earth_radius_km: f64, mu_km3_s2: f64) -> Result<Self> {
        if planes.len() < 2 {
            return Err(Error::Unsupported(format!(
                "a constellation needs at least 2 orbital planes, got {}",
                planes.len()
            )));
        }
        if !(earth_radius_km > 0.0) || !earth_radius_km.is_finite() {
            return Err(Error::domain("Earth radius must be positive", earth_radius_km));
        }
        if !(mu_km3_s2 > 0.0) || !mu_km3_s2.is_finite() {
            return Err(Error::domain("gravitational parameter must be positive", mu_km3_s2));
        }
        let mut offsets = Vec::with_capacity(planes.len() + 1);
        let mut periods = Vec::with_capacity(planes.len());
        let mut next = 0;
        for plane in &planes {
            if plane.satellites == 0 {
                return Err(Error::domain("every plane needs at least one satellite", 0.0));
            }
            if !plane.orientation_rad.is_finite() {
                return Err(Error::domain("plane orientation must be finite", plane.orientation_rad));
            }
            periods.push(orbital_period(plane.altitude_km, earth_radius_km, mu_km3_s2)?);
            offsets.push(next);
            next += plane.satellites;
        }
        offsets.push(next);
        Ok(ConstellationConfig {
            planes,
            earth_radius_km,
            mu_km3_s2,
            offsets,
            periods: OrbitalPeriodTable { seconds: periods },
        })
    }

    /// The evaluation layout: plane `m` (1-based) at `900 + 100 m` km with
    /// orientation `2 pi (m - 1) / M`, `sats_per_plane` satellites in each.
    pub fn walker_delta(num_planes: usize, sats_per_plane: usize) -> Result<Self> {
        let planes = (0..num_planes)
            .map(|m| OrbitalPlane {
                satellites: sats_per_plane,
                altitude_km: 1000.0 + 100.0 * m as f64,
                orientation_rad: TAU * m as f64 / num_planes as f64,
            })
            .collect();
        Self::new(planes, EARTH_RADIUS_KM, MU_EARTH_KM3_S2)
    }

    pub fn planes(&self) -> &[OrbitalPlane] {
        &self.planes
    }

    pub fn plane(&self, m: usize) -> &OrbitalPlane {
        &self.planes[m]
    }

    pub fn num_planes(&self) -> usize {
        self.planes.len()
    }

    pub fn total_satellites(&self) -> usize {
        self.offsets[self.planes.len()]
    }

    pub fn earth_radius_km(&self) -> f64 {
        self.earth_radius_km
    }

    pub fn mu_km3_s2(&self) -> f64 {
        self.mu_km3_s2
    }

    pub fn periods(&self) -> &OrbitalPeriodTable {
        &self.periods
    }

    /// Orbit radius `r_E + h_m`, km.
    pub fn radius_km(&self, m: usize) -> f64 {
        self.earth_radius_km + self.planes[m].altitude_km
    }

    /// Global index of satellite `index` in plane `m`.
    pub fn satellite_id(&self, m: usize, index: usize) -> usize {
        debug_assert!(index < self.planes[m].satellites);
        self.offsets[m] + index
    }

    /// `(plane, index within plane)` of a global satellite index. Satellites
    /// are numbered plane by plane, so with equal plane sizes this is integer
    /// division by the plane size.
    pub fn locate(&self, id: usize) -> (usize, usize) {
        assert!(id < self.total_satellites(), "satellite {id} out of range");
        let m = self.offsets.partition_point(|&start| start <= id) - 1;
        (m, id - self.offsets[m])
    }

    pub fn plane_of(&self, id: usize) -> usize {
        self.locate(id).0
    }

    /// Plane index of every satellite, in global index order.
    pub fn plane_lookup(&self) -> Vec<usize> {
        self.planes.iter().enumerate().flat_map(|(m, p)| std::iter::repeat_n(m, p.satellites)).collect()
    }

    /// Period of the plane with the lowest altitude.
    pub fn lowest_plane_period(&self) -> f64 {
        let lowest = self
            .planes
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.altitude_km.total_cmp(&b.1.altitude_km))
            .map(|(m, _)| m)
            .unwrap_or(0);
        self.periods.period(lowest)
    }

    /// Orbital angle of satellite `index` of plane `m` at time `t`, wrapped
    /// into `[0, 2 pi)`.
    pub fn orbital_angle(&self, m: usize, index: usize, t: f64) -> f64 {
        let turns = (t / self.periods.period(m)).rem_euclid(1.0) + index as f64 / self.planes[m].satellites as f64;
        wrap_angle(TAU * turns.rem_euclid(1.0))
    }

    pub fn position_eci(&self, m: usize, theta: f64) -> Eci {
        position_on_circle(self.radius_km(m), self.planes[m].orientation_rad, theta)
    }

    /// Distance between neighbouring satellites of plane `m`.
    pub fn slant_range_intra(&self, m: usize) -> Result<f64> {
        slant_range_intra(self.radius_km(m), self.planes[m].satellites)
    }

    pub fn state(&self, id: usize, t: f64) -> SatelliteState {
        let (m, index) = self.locate(id);
        self.state_in_plane(m, index, t)
    }

    fn state_in_plane(&self, m: usize, index: usize, t: f64) -> SatelliteState {
        let theta = self.orbital_angle(m, index, t);
        SatelliteState {
            id: self.satellite_id(m, index),
            plane: m,
            theta,
            radius_km: self.radius_km(m),
            orientation_rad: self.planes[m].orientation_rad,
            pos: self.position_eci(m, theta),
        }
    }

    /// States of all satellites at time `t`, in global index order.
    pub fn states_at(&self, t: f64) -> Vec<SatelliteState> {
        let mut out = Vec::with_capacity(self.total_satellites());
        for (m, plane) in self.planes.iter().enumerate() {
            out.extend((0..plane.satellites).map(|i| self.state_in_plane(m, i, t)));
        }
        out
    }
}

/// Per-plane orbital periods, seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitalPeriodTable {
    seconds: Vec<f64>,
}

impl OrbitalPeriodTable {
    pub fn period(&self, m: usize) -> f64 {
        self.seconds[m]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.seconds
    }
}

/// Position and phase of one satellite at a snapshot time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SatelliteState {
    pub id: usize,
    pub plane: usize,
    pub theta: f64,
    pub radius_km: f64,
    pub orientation_rad: f64,
    pub pos: Eci,
}

impl SatelliteState {
    /// Unit vector along the orbital angular momentum of this satellite's
    /// plane (the pitch axis).
    pub fn orbit_normal(&self) -> Eci {
        orbit_normal(self.orientation_rad)
    }
}

/// Circular orbital period from Kepler's third law, seconds.
pub fn orbital_period(altitude_km: f64, earth_radius_km: f64, mu_km3_s2: f64) -> Result<f64> {
    if !(altitude_km > 0.0) || !altitude_km.is_finite() {
        return Err(Error::domain("altitude must be positive", altitude_km));
    }
    if !(earth_radius_km > 0.0) {
        return Err(Error::domain("Earth radius must be positive", earth_radius_km));
    }
    if !(mu_km3_s2 > 0.0) {
        return Err(Error::domain("gravitational parameter must be positive", mu_km3_s2));
    }
    let r = earth_radius_km + altitude_km;
    Ok(TAU * (r * r * r / mu_km3_s2).sqrt())
}

pub fn position_on_circle(radius_km: f64, orientation_rad: f64, theta: f64) -> Eci {
    let (sin_t, cos_t) = theta.sin_cos();
    let (sin_e, cos_e) = orientation_rad.sin_cos();
    Eci::new(radius_km * cos_t, radius_km * cos_e * sin_t, radius_km * sin_e * sin_t)
}

pub fn orbit_normal(orientation_rad: f64) -> Eci {
    let (sin_e, cos_e) = orientation_rad.sin_cos();
    Eci::new(0.0, -sin_e, cos_e)
}

/// Chord between neighbours on a circle of `radius_km` carrying
/// `satellites` evenly spaced satellites: `2 r cos(pi/N) tan(pi/N)`.
pub fn slant_range_intra(radius_km: f64, satellites: usize) -> Result<f64> {
    if satellites < 2 {
        return Err(Error::domain("intra-plane range needs at least 2 satellites", satellites as f64));
    }
    let a = PI / satellites as f64;
    Ok(2.0 * radius_km * a.cos() * a.tan())
}

/// Line-of-sight distance between two satellites, km.
///
/// Evaluates
/// `sqrt(ra^2 + rb^2 - 2 ra rb [cos ta cos tb + cos(ea - eb) sin ta sin tb])`
/// in the algebraically identical form
/// `sqrt((ra - rb)^2 + 4 ra rb [sin^2((ta - tb)/2) + sin^2((ea - eb)/2) sin ta sin tb])`,
/// which does not lose precision when the satellites are close together.
pub fn slant_range(a: &SatelliteState, b: &SatelliteState) -> f64 {
    let half_sep = (0.5 * (a.orientation_rad - b.orientation_rad)).sin();
    slant_range_parts(a.radius_km, a.theta, b.radius_km, b.theta, half_sep * half_sep)
}

/// Core of [`slant_range`], with `sin^2((ea - eb)/2)` precomputed.
#[inline]
pub(crate) fn slant_range_parts(ra: f64, ta: f64, rb: f64, tb: f64, sin2_half_sep: f64) -> f64 {
    let half_dt = (0.5 * (ta - tb)).sin();
    let bracket = half_dt * half_dt + sin2_half_sep * ta.sin() * tb.sin();
    let dr = ra - rb;
    (dr * dr + 4.0 * ra * rb * bracket).max(0.0).sqrt()
}

fn wrap_angle(theta: f64) -> f64 {
    if !(0.0..TAU).contains(&theta) {
        0.0
    } else {
        theta
    }
}

use crate::geometry::{Eci, SatelliteState};

use super::Side;

/// Outcome of classifying which face of `i` points at `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SideOf {
    pub side: Side,
    /// `j` lies (numerically) in the geometric plane of `i`'s orbit; the side
    /// was resolved to `Y+` by convention.
    pub degenerate: bool,
}

/// Relative tolerance below which the displacement is treated as lying in
/// the orbital plane of `i`.
const DEGENERATE_TOLERANCE: f64 = 1e-12;

/// Side of `j` relative to `i`: the sign of the displacement `pos_j - pos_i`
/// along the orbit normal of `i`'s plane.
pub fn side_of(i: &SatelliteState, j: &SatelliteState) -> SideOf {
    classify(i.orbit_normal(), j.pos - i.pos, i.id, j.id)
}

fn classify(normal: Eci, delta: Eci, i: usize, j: usize) -> SideOf {
    let along = delta.dot(normal);
    if along.abs() < DEGENERATE_TOLERANCE * delta.norm() {
        log::debug!("satellite {j} lies in the orbital plane of satellite {i}; using Y+");
        return SideOf { side: Side::YPlus, degenerate: true };
    }
    let side = if along > 0.0 { Side::YPlus } else { Side::YMinus };
    SideOf { side, degenerate: false }
}

/// Side lookup over one snapshot's satellite states.
#[derive(Debug, Clone)]
pub struct SideTable<'a> {
    states: &'a [SatelliteState],
    normals: Vec<Eci>,
}

impl<'a> SideTable<'a> {
    /// `states` must be indexed by satellite id.
    pub fn new(states: &'a [SatelliteState]) -> Self {
        debug_assert!(states.iter().enumerate().all(|(k, s)| s.id == k));
        let normals = states.iter().map(SatelliteState::orbit_normal).collect();
        SideTable { states, normals }
    }

    pub fn side(&self, i: usize, j: usize) -> Side {
        self.classify(i, j).side
    }

    pub fn classify(&self, i: usize, j: usize) -> SideOf {
        classify(self.normals[i], self.states[j].pos - self.states[i].pos, i, j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{position_on_circle, ConstellationConfig};

    fn state(id: usize, pos: Eci, orientation: f64) -> SatelliteState {
        SatelliteState { id, plane: id, theta: 0.0, radius_km: pos.norm(), orientation_rad: orientation, pos }
    }

    #[test]
    fn above_the_orbit_normal_is_plus() {
        let i = state(0, position_on_circle(7000.0, 0.0, 0.0), 0.0);
        // normal of an unrotated plane is +z
        let j = state(1, Eci::new(7000.0, 0.0, 50.0), 1.0);
        assert_eq!(side_of(&i, &j), SideOf { side: Side::YPlus, degenerate: false });
        let k = state(2, Eci::new(7000.0, 0.0, -50.0), 1.0);
        assert_eq!(side_of(&i, &k).side, Side::YMinus);
    }

    #[test]
    fn mirroring_flips_the_side() {
        let eps = 0.7;
        let i = state(0, position_on_circle(7100.0, eps, 1.0), eps);
        let n = i.orbit_normal();
        let j = state(1, Eci::new(i.pos.x + 10.0 + 30.0 * n.x, i.pos.y + 30.0 * n.y, i.pos.z + 30.0 * n.z), 2.0);
        let mirrored = state(2, Eci::new(i.pos.x + 10.0 - 30.0 * n.x, i.pos.y - 30.0 * n.y, i.pos.z - 30.0 * n.z), 2.0);
        assert_eq!(side_of(&i, &j).side, Side::YPlus);
        assert_eq!(side_of(&i, &mirrored).side, Side::YMinus);
    }

    #[test]
    fn coplanar_partner_is_degenerate() {
        let i = state(0, position_on_circle(7000.0, 0.0, 0.0), 0.0);
        let j = state(1, position_on_circle(7100.0, 0.0, 0.3), 0.0);
        assert_eq!(side_of(&i, &j), SideOf { side: Side::YPlus, degenerate: true });
    }

    #[test]
    fn equatorial_plane_against_closed_form() {
        // with i in the unrotated plane, the offset of j along +z is
        // r_j sin(eps) sin(theta_j), and the offset of i along j's normal is
        // -r_i sin(eps) sin(theta_i)
        let c = ConstellationConfig::walker_delta(5, 40).unwrap();
        let mut checked = 0;
        for step in 0..20 {
            let states = c.states_at(13.7 + step as f64 * 97.0);
            let table = SideTable::new(&states);
            for i in (0..40).map(|k| c.satellite_id(0, k)) {
                for j in (0..40).map(|k| c.satellite_id(1, k)) {
                    let (si, sj) = (states[i].theta.sin(), states[j].theta.sin());
                    if si.abs() < 1e-6 || sj.abs() < 1e-6 {
                        continue;
                    }
                    let towards_j = if sj > 0.0 { Side::YPlus } else { Side::YMinus };
                    let towards_i = if si < 0.0 { Side::YPlus } else { Side::YMinus };
                    assert_eq!(table.classify(i, j), SideOf { side: towards_j, degenerate: false });
                    assert_eq!(table.classify(j, i), SideOf { side: towards_i, degenerate: false });
                    checked += 1;
                }
            }
        }
        assert!(checked > 30_000);
    }
}

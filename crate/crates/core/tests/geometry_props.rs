use std::f64::consts::TAU;

use proptest::prelude::*;

use islmatch::geometry::{orbital_period, slant_range, ConstellationConfig, EARTH_RADIUS_KM, MU_EARTH_KM3_S2};
use islmatch::linkbudget::{build_cost_matrix, PowerPolicy};
use islmatch::matching::Transceivers;
use islmatch::sim::{SimulationPlan, SolverKind};

fn constellation() -> impl Strategy<Value = (ConstellationConfig, f64)> {
    (2usize..=8, 4usize..=30, 0.0..2.0e5f64).prop_map(|(m, n, t)| (ConstellationConfig::walker_delta(m, n).unwrap(), t))
}

proptest! {
    #[test]
    fn positions_lie_on_their_orbit((c, t) in constellation()) {
        for s in c.states_at(t) {
            let r = EARTH_RADIUS_KM + c.plane(s.plane).altitude_km;
            prop_assert!((s.pos.norm() - r).abs() <= 1e-9 * r);
            prop_assert!((0.0..TAU).contains(&s.theta));
            prop_assert!(s.pos.dot(s.orbit_normal()).abs() <= 1e-9 * r);
        }
    }

    #[test]
    fn slant_range_is_a_metric((c, t) in constellation(), picks in prop::array::uniform3(any::<prop::sample::Index>())) {
        let states = c.states_at(t);
        let [a, b, d] = picks.map(|p| &states[p.index(states.len())]);
        let ab = slant_range(a, b);
        prop_assert!(ab >= 0.0);
        prop_assert!((ab - slant_range(b, a)).abs() <= 1e-9 * ab.max(1.0));
        prop_assert!(slant_range(a, a) <= 1e-6);
        prop_assert!(slant_range(a, d) <= ab + slant_range(b, d) + 1e-6);
        prop_assert!((ab - a.pos.distance(b.pos)).abs() <= 1e-9 * ab.max(1.0));
    }

    #[test]
    fn intra_plane_spacing_is_constant((c, t) in constellation()) {
        let states = c.states_at(t);
        for m in 0..c.num_planes() {
            let n = c.plane(m).satellites;
            let l = c.slant_range_intra(m).unwrap();
            for k in 0..n {
                let a = &states[c.satellite_id(m, k)];
                let b = &states[c.satellite_id(m, (k + 1) % n)];
                prop_assert!((slant_range(a, b) - l).abs() <= 1e-9 * l);
            }
        }
    }

    #[test]
    fn period_grows_with_altitude(h in 200.0..40_000.0f64, dh in 1.0..1000.0f64) {
        let lo = orbital_period(h, EARTH_RADIUS_KM, MU_EARTH_KM3_S2).unwrap();
        let hi = orbital_period(h + dh, EARTH_RADIUS_KM, MU_EARTH_KM3_S2).unwrap();
        prop_assert!(hi > lo);
    }

    #[test]
    fn cost_matrix_respects_the_policy((c, t) in constellation(), eta in 0.5..3.0f64) {
        let plan = SimulationPlan { eta, ..SimulationPlan::new("p", c.clone(), SolverKind::Greedy, Transceivers::One) };
        let policy: PowerPolicy = plan.policy().unwrap();
        let states = c.states_at(t);
        let w = build_cost_matrix(&states, &policy, &vec![true; states.len()]);
        prop_assert!(w.check_structure().is_ok());
        for i in 0..states.len() {
            for j in 0..states.len() {
                let l = slant_range(&states[i], &states[j]);
                match w.get(i, j) {
                    Some(p) => {
                        prop_assert_ne!(states[i].plane, states[j].plane);
                        prop_assert_eq!(Some(p), w.get(j, i));
                        prop_assert_eq!(Some(policy.level_of_cost(p)), policy.select(l));
                    }
                    None => {
                        prop_assert!(states[i].plane == states[j].plane || policy.select(l).is_none());
                    }
                }
            }
        }
    }
}

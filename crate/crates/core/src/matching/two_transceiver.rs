use crate::linkbudget::CostMatrix;

use super::{sorted_edges, Assignment, MatchState, Pair, Side};

/// Greedy matching with one transceiver on each of the `Y+` and `Y-` faces.
///
/// Candidates are visited cheapest first. A candidate `(i, j)` is linked when
/// the face of `i` towards `j` and the face of `j` towards `i` are both free;
/// either way it is never revisited. A satellite leaves the pool once both
/// faces are engaged. `side(i, j)` gives the face of `i` that sees `j`.
pub fn solve_two_transceiver(costs: &CostMatrix, side: impl Fn(usize, usize) -> Side) -> Assignment {
    let mut slots = vec![[false; 2]; costs.len()];
    let mut pairs = Vec::new();
    let edges = sorted_edges(costs, None, &[]);
    fill(edges, &side, &mut slots, &mut pairs);
    Assignment::from_pairs(pairs)
}

/// Markovian variant: previous links whose current cost is finite are kept
/// with their faces, and the remaining faces are filled greedily.
pub fn solve_two_transceiver_markovian(
    costs: &CostMatrix,
    side: impl Fn(usize, usize) -> Side,
    state: &MatchState,
) -> Assignment {
    let n = costs.len();
    let mut slots = vec![[false; 2]; n];
    let mut pairs = Vec::new();
    let mut kept = Vec::new();
    for p in state.previous.pairs() {
        let w = costs.raw(p.a, p.b);
        if !w.is_finite() {
            continue;
        }
        let Some((sa, sb)) = p.sides else {
            debug_assert!(false, "previous two-transceiver pair without sides");
            continue;
        };
        debug_assert!(!slots[p.a][sa.slot()] && !slots[p.b][sb.slot()]);
        slots[p.a][sa.slot()] = true;
        slots[p.b][sb.slot()] = true;
        kept.push(p.key());
        pairs.push(Pair { cost: w, ..*p });
    }
    let full: Vec<bool> = slots.iter().map(|s| *s == [true, true]).collect();
    let edges = sorted_edges(costs, Some(&full), &kept);
    fill(edges, &side, &mut slots, &mut pairs);
    Assignment::from_pairs(pairs)
}

fn fill(
    edges: Vec<(f64, usize, usize)>,
    side: &impl Fn(usize, usize) -> Side,
    slots: &mut [[bool; 2]],
    pairs: &mut Vec<Pair>,
) {
    for (w, i, j) in edges {
        if slots[i] == [true, true] || slots[j] == [true, true] {
            continue;
        }
        let (di, dj) = (side(i, j), side(j, i));
        if !slots[i][di.slot()] && !slots[j][dj.slot()] {
            slots[i][di.slot()] = true;
            slots[j][dj.slot()] = true;
            pairs.push(Pair::with_sides(i, j, w, di, dj));
        }
    }
}

use crate::linkbudget::CostMatrix;

use super::{sorted_edges, Assignment, MatchState, Pair};

/// Greedy heuristic for one transceiver: repeatedly link the cheapest
/// remaining finite pair and remove both satellites, until no finite entry
/// is left.
pub fn solve_greedy(costs: &CostMatrix) -> Assignment {
    let mut busy = vec![false; costs.len()];
    let mut pairs = Vec::with_capacity(costs.len() / 2);
    let edges = sorted_edges(costs, None, &[]);
    fill_greedy(edges, &mut busy, &mut pairs);
    Assignment::from_pairs(pairs)
}

/// Markovian variant: every previous pair whose current cost is finite is
/// kept; the remaining satellites are matched greedily.
pub fn solve_markovian(costs: &CostMatrix, state: &MatchState) -> Assignment {
    let n = costs.len();
    let mut busy = vec![false; n];
    let mut pairs = Vec::with_capacity(n / 2);
    pairs.extend_from_slice(state.previous.pairs());
    pairs.retain_mut(|p| {
        debug_assert!(!busy[p.a] && !busy[p.b], "previous assignment reuses a satellite");
        let w = costs.raw(p.a, p.b);
        if w.is_finite() {
            busy[p.a] = true;
            busy[p.b] = true;
            *p = Pair::new(p.a, p.b, w);
        }
        w.is_finite()
    });
    let edges = sorted_edges(costs, Some(&busy), &[]);
    fill_greedy(edges, &mut busy, &mut pairs);
    Assignment::from_pairs(pairs)
}

fn fill_greedy(edges: Vec<(f64, usize, usize)>, busy: &mut [bool], pairs: &mut Vec<Pair>) {
    for (w, i, j) in edges {
        if !busy[i] && !busy[j] {
            busy[i] = true;
            busy[j] = true;
            pairs.push(Pair::new(i, j, w));
        }
    }
}

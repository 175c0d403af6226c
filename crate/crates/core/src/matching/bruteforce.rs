//! Exhaustive reference solver for small instances.
//!
//! Objective, in order: most links, lowest total cost, lexicographically
//! smallest pair list.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::linkbudget::CostMatrix;

use super::{Assignment, Pair, Side, Transceivers};

/// Largest number of satellites accepted.
pub const BRUTEFORCE_LIMIT: usize = 12;

pub fn solve_bruteforce(
    costs: &CostMatrix,
    mode: Transceivers,
    side: Option<&dyn Fn(usize, usize) -> Side>,
) -> Result<Assignment> {
    let n = costs.len();
    if n > BRUTEFORCE_LIMIT {
        return Err(Error::TooLarge { n, limit: BRUTEFORCE_LIMIT });
    }
    let mut search = Search { best: None, chosen: Vec::new() };
    match mode {
        Transceivers::One => {
            let mut used = vec![false; n];
            search.one(costs, 0, &mut used);
        }
        Transceivers::Two => {
            let side = side.ok_or_else(|| Error::Unsupported("two-transceiver search needs a side lookup".into()))?;
            // node 2i + s is face s of satellite i; every finite pair is an
            // edge between the two faces it would occupy
            let mut adjacency = vec![Vec::new(); 2 * n];
            for (i, j, w) in costs.finite_edges() {
                let (u, v) = (2 * i + side(i, j).slot(), 2 * j + side(j, i).slot());
                adjacency[u].push((v, i, j, w));
                adjacency[v].push((u, i, j, w));
            }
            let mut used = vec![false; 2 * n];
            search.two(&adjacency, 0, &mut used);
        }
    }
    Ok(search.best.map(|b| b.assignment).unwrap_or_default())
}

struct Candidate {
    assignment: Assignment,
    cost: f64,
    keys: Vec<(usize, usize)>,
}

struct Search {
    best: Option<Candidate>,
    chosen: Vec<Pair>,
}

impl Search {
    fn one(&mut self, costs: &CostMatrix, from: usize, used: &mut [bool]) {
        let Some(i) = (from..used.len()).find(|&i| !used[i]) else {
            return self.offer();
        };
        used[i] = true;
        // leave i unmatched
        self.one(costs, i + 1, used);
        for j in i + 1..used.len() {
            if used[j] {
                continue;
            }
            if let Some(w) = costs.get(i, j) {
                used[j] = true;
                self.chosen.push(Pair::new(i, j, w));
                self.one(costs, i + 1, used);
                self.chosen.pop();
                used[j] = false;
            }
        }
        used[i] = false;
    }

    fn two(&mut self, adjacency: &[Vec<(usize, usize, usize, f64)>], from: usize, used: &mut [bool]) {
        let Some(u) = (from..used.len()).find(|&u| !used[u]) else {
            return self.offer();
        };
        used[u] = true;
        self.two(adjacency, u + 1, used);
        for &(v, i, j, w) in &adjacency[u] {
            if v < u || used[v] {
                continue;
            }
            used[v] = true;
            let face = |node: usize| if node.is_multiple_of(2) { Side::YPlus } else { Side::YMinus };
            let (si, sj) = if u / 2 == i { (face(u), face(v)) } else { (face(v), face(u)) };
            self.chosen.push(Pair::with_sides(i, j, w, si, sj));
            self.two(adjacency, u + 1, used);
            self.chosen.pop();
            used[v] = false;
        }
        used[u] = false;
    }

    fn offer(&mut self) {
        let assignment = Assignment::from_pairs(self.chosen.clone());
        let cost = assignment.total_cost();
        let keys: Vec<_> = assignment.pairs().iter().map(Pair::key).collect();
        let better = match &self.best {
            None => true,
            Some(b) => {
                keys.len().cmp(&b.keys.len()).reverse().then(cost.total_cmp(&b.cost)).then_with(|| keys.cmp(&b.keys))
                    == Ordering::Less
            }
        };
        if better {
            self.best = Some(Candidate { assignment, cost, keys });
        }
    }
}

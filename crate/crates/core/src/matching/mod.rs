//! Per-snapshot inter-plane matching.
//!
//! Every solver reads an immutable [`CostMatrix`] and returns an
//! [`Assignment`]. Ties between equal costs always go to the lowest row index,
//! then the lowest column index, so every solver is deterministic.

mod bruteforce;
mod greedy;
mod hungarian;
mod side;
mod two_transceiver;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::linkbudget::CostMatrix;

pub use bruteforce::{solve_bruteforce, BRUTEFORCE_LIMIT};
pub use greedy::{solve_greedy, solve_markovian};
pub use hungarian::solve_hungarian;
pub use side::{side_of, SideOf, SideTable};
pub use two_transceiver::{solve_two_transceiver, solve_two_transceiver_markovian};

/// Which antenna face of a satellite serves a link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    #[serde(rename = "Y+")]
    YPlus,
    #[serde(rename = "Y-")]
    YMinus,
}

impl Side {
    pub(crate) fn slot(self) -> usize {
        match self {
            Side::YPlus => 0,
            Side::YMinus => 1,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::YPlus => "Y+",
            Side::YMinus => "Y-",
        })
    }
}

/// Number of inter-plane transceivers per satellite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Transceivers {
    One,
    Two,
}

impl Transceivers {
    pub fn count(self) -> u8 {
        match self {
            Transceivers::One => 1,
            Transceivers::Two => 2,
        }
    }

    pub fn from_count(n: u8) -> Option<Self> {
        match n {
            1 => Some(Transceivers::One),
            2 => Some(Transceivers::Two),
            _ => None,
        }
    }
}

/// One established link. `a < b`; `sides`, when present, holds the face used
/// at `a` and the face used at `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pair {
    pub a: usize,
    pub b: usize,
    pub cost: f64,
    pub sides: Option<(Side, Side)>,
}

impl Pair {
    pub fn new(i: usize, j: usize, cost: f64) -> Self {
        Pair { a: i.min(j), b: i.max(j), cost, sides: None }
    }

    /// A two-transceiver link where `i` uses `side_i` and `j` uses `side_j`.
    pub fn with_sides(i: usize, j: usize, cost: f64, side_i: Side, side_j: Side) -> Self {
        let sides = if i < j { (side_i, side_j) } else { (side_j, side_i) };
        Pair { a: i.min(j), b: i.max(j), cost, sides: Some(sides) }
    }

    pub fn key(&self) -> (usize, usize) {
        (self.a, self.b)
    }

    pub fn other(&self, i: usize) -> Option<usize> {
        if i == self.a {
            Some(self.b)
        } else if i == self.b {
            Some(self.a)
        } else {
            None
        }
    }

    /// Face used at endpoint `i`.
    pub fn side_at(&self, i: usize) -> Option<Side> {
        let (sa, sb) = self.sides?;
        if i == self.a {
            Some(sa)
        } else if i == self.b {
            Some(sb)
        } else {
            None
        }
    }
}

/// The matching produced for one snapshot. Pairs are kept sorted by
/// `(a, b)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Assignment {
    pairs: Vec<Pair>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(mut pairs: Vec<Pair>) -> Self {
        if !pairs.is_sorted_by_key(Pair::key) {
            pairs.sort_by_key(Pair::key);
        }
        Assignment { pairs }
    }

    pub fn pairs(&self) -> &[Pair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.find(i, j).is_some()
    }

    pub fn find(&self, i: usize, j: usize) -> Option<&Pair> {
        let key = (i.min(j), i.max(j));
        self.pairs.binary_search_by_key(&key, Pair::key).ok().map(|k| &self.pairs[k])
    }

    /// Sum of pair costs. Costs are added in ascending order so that equal
    /// multisets of costs always give bit-identical totals.
    pub fn total_cost(&self) -> f64 {
        let mut costs: Vec<f64> = self.pairs.iter().map(|p| p.cost).collect();
        costs.sort_by(f64::total_cmp);
        costs.iter().sum()
    }

    /// Checks degree, side, reachability and inter-plane constraints against
    /// the matrix the assignment was computed from.
    pub fn validate(&self, costs: &CostMatrix, mode: Transceivers) -> Result<(), Violation> {
        let n = costs.len();
        let mut slots = vec![[false; 2]; n];
        let mut degree = vec![0u8; n];
        for (k, p) in self.pairs.iter().enumerate() {
            if p.a >= n || p.b >= n {
                return Err(Violation::UnknownSatellite(p.a.max(p.b)));
            }
            if p.a >= p.b {
                return Err(Violation::NotNormalized(p.a, p.b));
            }
            if k > 0 && self.pairs[k - 1].key() >= p.key() {
                return Err(Violation::Duplicate(p.a, p.b));
            }
            if costs.plane_of(p.a) == costs.plane_of(p.b) {
                return Err(Violation::SamePlane(p.a, p.b));
            }
            match costs.get(p.a, p.b) {
                None => return Err(Violation::Unreachable(p.a, p.b)),
                Some(w) if w.to_bits() != p.cost.to_bits() => {
                    return Err(Violation::CostMismatch { a: p.a, b: p.b, recorded: p.cost, matrix: w })
                }
                Some(_) => {}
            }
            for i in [p.a, p.b] {
                degree[i] += 1;
                if degree[i] > mode.count() {
                    return Err(Violation::Degree(i));
                }
            }
            match (mode, p.sides) {
                (Transceivers::One, Some(_)) => return Err(Violation::UnexpectedSides(p.a, p.b)),
                (Transceivers::Two, None) => return Err(Violation::MissingSides(p.a, p.b)),
                (Transceivers::Two, Some((sa, sb))) => {
                    for (i, s) in [(p.a, sa), (p.b, sb)] {
                        if std::mem::replace(&mut slots[i][s.slot()], true) {
                            return Err(Violation::SideConflict(i, s));
                        }
                    }
                }
                (Transceivers::One, None) => {}
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Violation {
    #[error("satellite {0} is not in the cost matrix")]
    UnknownSatellite(usize),
    #[error("pair ({0}, {1}) is not stored with a < b")]
    NotNormalized(usize, usize),
    #[error("pair ({0}, {1}) appears twice")]
    Duplicate(usize, usize),
    #[error("pair ({0}, {1}) lies within one plane")]
    SamePlane(usize, usize),
    #[error("pair ({0}, {1}) has no finite cost")]
    Unreachable(usize, usize),
    #[error("pair ({a}, {b}) records cost {recorded} but the matrix holds {matrix}")]
    CostMismatch { a: usize, b: usize, recorded: f64, matrix: f64 },
    #[error("satellite {0} exceeds its transceiver count")]
    Degree(usize),
    #[error("satellite {0} uses side {1} twice")]
    SideConflict(usize, Side),
    #[error("pair ({0}, {1}) carries side tags in one-transceiver mode")]
    UnexpectedSides(usize, usize),
    #[error("pair ({0}, {1}) lacks side tags in two-transceiver mode")]
    MissingSides(usize, usize),
}

/// Matching carried from snapshot `s - 1` into snapshot `s`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MatchState {
    pub previous: Assignment,
    pub s: u64,
}

impl MatchState {
    pub fn new(previous: Assignment, s: u64) -> Self {
        MatchState { previous, s }
    }
}

/// Finite edges between satellites not marked in `skip`, minus `exclude`
/// (sorted), ordered by `(cost, i, j)` with `i < j`.
pub(crate) fn sorted_edges(
    costs: &CostMatrix,
    skip: Option<&[bool]>,
    exclude: &[(usize, usize)],
) -> Vec<(f64, usize, usize)> {
    let mut edges = Vec::new();
    match skip {
        None => {
            for i in 0..costs.len() {
                let row = costs.row(i);
                edges.extend(costs.neighbors(i).iter().filter(|&&j| j > i).map(|&j| (row[j], i, j)));
            }
        }
        Some(skip) => {
            for (i, _) in skip.iter().enumerate().filter(|(_, &s)| !s) {
                let row = costs.row(i);
                edges.extend(costs.neighbors(i).iter().filter(|&&j| j > i && !skip[j]).map(|&j| (row[j], i, j)));
            }
        }
    }
    if !exclude.is_empty() {
        edges.retain(|&(_, i, j)| exclude.binary_search(&(i, j)).is_err());
    }
    edges.sort_unstable_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    edges
}

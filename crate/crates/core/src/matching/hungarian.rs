//! Optimal two-plane matching with the classical Munkres procedure (star,
//! prime and cover steps on a reduced square matrix).

use crate::error::{Error, Result};
use crate::linkbudget::CostMatrix;

use super::{Assignment, Pair};

/// Minimum-cost matching between the two planes of `costs`.
///
/// Unreachable entries are replaced by a penalty larger than any sum of
/// finite costs, so the result first maximizes the number of finite links and
/// then minimizes their cost. Links that could only be made at the penalty are
/// dropped from the output.
pub fn solve_hungarian(costs: &CostMatrix) -> Result<Assignment> {
    if costs.num_planes() != 2 {
        return Err(Error::Unsupported(format!(
            "the Hungarian solver handles exactly 2 planes, got {}",
            costs.num_planes()
        )));
    }
    let rows: Vec<usize> = (0..costs.len()).filter(|&i| costs.plane_of(i) == 0).collect();
    let cols: Vec<usize> = (0..costs.len()).filter(|&i| costs.plane_of(i) == 1).collect();
    let k = rows.len().max(cols.len());

    let max_finite = rows
        .iter()
        .flat_map(|&i| cols.iter().map(move |&j| costs.raw(i, j)))
        .filter(|w| w.is_finite())
        .fold(f64::NEG_INFINITY, f64::max);
    if max_finite == f64::NEG_INFINITY {
        return Ok(Assignment::new());
    }
    let penalty = (k as f64 + 1.0) * max_finite.max(1.0) * 2.0;

    let mut square = vec![penalty; k * k];
    for (r, &i) in rows.iter().enumerate() {
        for (c, &j) in cols.iter().enumerate() {
            let w = costs.raw(i, j);
            if w.is_finite() {
                square[r * k + c] = w;
            }
        }
    }

    let matched = Munkres::new(square, k).solve();
    let pairs = matched
        .into_iter()
        .enumerate()
        .filter(|&(r, c)| r < rows.len() && c < cols.len())
        .filter_map(|(r, c)| {
            let (i, j) = (rows[r], cols[c]);
            costs.get(i, j).map(|w| Pair::new(i, j, w))
        })
        .collect();
    Ok(Assignment::from_pairs(pairs))
}

const NONE: usize = usize::MAX;

struct Munkres {
    c: Vec<f64>,
    k: usize,
    star_in_row: Vec<usize>,
    star_in_col: Vec<usize>,
    prime_in_row: Vec<usize>,
    row_covered: Vec<bool>,
    col_covered: Vec<bool>,
}

impl Munkres {
    fn new(c: Vec<f64>, k: usize) -> Self {
        Munkres {
            c,
            k,
            star_in_row: vec![NONE; k],
            star_in_col: vec![NONE; k],
            prime_in_row: vec![NONE; k],
            row_covered: vec![false; k],
            col_covered: vec![false; k],
        }
    }

    /// Column assigned to each row.
    fn solve(mut self) -> Vec<usize> {
        let k = self.k;
        // reduce rows, then columns
        for r in 0..k {
            let row = &mut self.c[r * k..(r + 1) * k];
            let min = row.iter().copied().fold(f64::INFINITY, f64::min);
            row.iter_mut().for_each(|x| *x -= min);
        }
        for col in 0..k {
            let min = (0..k).map(|r| self.c[r * k + col]).fold(f64::INFINITY, f64::min);
            for r in 0..k {
                self.c[r * k + col] -= min;
            }
        }
        // initial stars
        for r in 0..k {
            for col in 0..k {
                if self.c[r * k + col] == 0.0 && self.star_in_row[r] == NONE && self.star_in_col[col] == NONE {
                    self.star_in_row[r] = col;
                    self.star_in_col[col] = r;
                }
            }
        }

        loop {
            // cover starred columns; done once every column holds a star
            let mut covered = 0;
            for col in 0..k {
                self.col_covered[col] = self.star_in_col[col] != NONE;
                covered += self.col_covered[col] as usize;
            }
            if covered == k {
                return self.star_in_row;
            }
            let (r, col) = self.prime_until_augmenting();
            self.augment(r, col);
        }
    }

    /// Primes uncovered zeros, adjusting the matrix when none remain, until a
    /// primed zero has no star in its row.
    fn prime_until_augmenting(&mut self) -> (usize, usize) {
        loop {
            match self.find_uncovered_zero() {
                Some((r, col)) => {
                    self.prime_in_row[r] = col;
                    let star = self.star_in_row[r];
                    if star == NONE {
                        return (r, col);
                    }
                    self.row_covered[r] = true;
                    self.col_covered[star] = false;
                }
                None => self.shift_by_min_uncovered(),
            }
        }
    }

    fn find_uncovered_zero(&self) -> Option<(usize, usize)> {
        let k = self.k;
        for r in (0..k).filter(|&r| !self.row_covered[r]) {
            let row = &self.c[r * k..(r + 1) * k];
            if let Some(col) = (0..k).find(|&c| !self.col_covered[c] && row[c] == 0.0) {
                return Some((r, col));
            }
        }
        None
    }

    fn shift_by_min_uncovered(&mut self) {
        let k = self.k;
        let mut min = f64::INFINITY;
        for r in (0..k).filter(|&r| !self.row_covered[r]) {
            for col in (0..k).filter(|&col| !self.col_covered[col]) {
                min = min.min(self.c[r * k + col]);
            }
        }
        debug_assert!(min.is_finite() && min > 0.0);
        for r in 0..k {
            for col in 0..k {
                let x = &mut self.c[r * k + col];
                if self.row_covered[r] {
                    *x += min;
                }
                if !self.col_covered[col] {
                    *x -= min;
                }
            }
        }
    }

    /// Flips stars and primes along the alternating path starting at the
    /// primed zero `(r, col)`, then clears primes and covers.
    fn augment(&mut self, mut r: usize, mut col: usize) {
        loop {
            let next_r = self.star_in_col[col];
            self.star_in_row[r] = col;
            self.star_in_col[col] = r;
            if next_r == NONE {
                break;
            }
            // the star at (next_r, col) is replaced; follow the prime in its row
            r = next_r;
            col = self.prime_in_row[r];
            debug_assert_ne!(col, NONE);
        }
        self.prime_in_row.fill(NONE);
        self.row_covered.fill(false);
        self.col_covered.fill(false);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::testing::*;
    use crate::matching::Transceivers;

    const INF: f64 = f64::INFINITY;

    /// Minimum over all permutations of the `k x k` block, counting only
    /// finite entries and maximizing their number first.
    fn enumerate_best(block: &[Vec<f64>]) -> (usize, f64) {
        fn go(block: &[Vec<f64>], r: usize, used: &mut Vec<bool>, links: usize, cost: f64, best: &mut (usize, f64)) {
            if r == block.len() {
                if links > best.0 || (links == best.0 && cost < best.1) {
                    *best = (links, cost);
                }
                return;
            }
            for c in 0..block.len() {
                if !used[c] {
                    used[c] = true;
                    let w = block[r][c];
                    if w.is_finite() {
                        go(block, r + 1, used, links + 1, cost + w, best);
                    } else {
                        go(block, r + 1, used, links, cost, best);
                    }
                    used[c] = false;
                }
            }
        }
        let mut best = (0, f64::INFINITY);
        go(block, 0, &mut vec![false; block.len()], 0, 0.0, &mut best);
        best
    }

    #[test]
    fn diagonal_two_by_two() {
        let w = bipartite(&[vec![1.0, 2.0], vec![3.0, 1.0]]);
        let a = solve_hungarian(&w).unwrap();
        assert_eq!(a.pairs(), &[Pair::new(0, 2, 1.0), Pair::new(1, 3, 1.0)]);
        assert_eq!(a.total_cost(), 2.0);
    }

    #[test]
    fn all_unreachable() {
        let w = bipartite(&[vec![INF, INF], vec![INF, INF]]);
        let a = solve_hungarian(&w).unwrap();
        assert!(a.is_empty());
        assert_eq!(a.total_cost(), 0.0);
    }

    #[test]
    fn rejects_more_than_two_planes() {
        let w = CostMatrix::unreachable(planes(&[2, 2, 2]));
        assert!(matches!(solve_hungarian(&w), Err(Error::Unsupported(_))));
    }

    #[test]
    fn random_six_by_six_against_enumeration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for _ in 0..100 {
            let block: Vec<Vec<f64>> =
                (0..6).map(|_| (0..6).map(|_| rng.gen_range(0.0..100.0f64).round()).collect()).collect();
            let a = solve_hungarian(&bipartite(&block)).unwrap();
            let (links, cost) = enumerate_best(&block);
            assert_eq!(a.len(), links);
            assert_eq!(a.total_cost(), cost);
        }
    }

    #[test]
    fn sparse_blocks_maximize_links_first() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(12);
        for _ in 0..200 {
            let k = rng.gen_range(1..6);
            let block: Vec<Vec<f64>> = (0..k)
                .map(|_| (0..k).map(|_| if rng.gen_bool(0.4) { INF } else { rng.gen_range(1..20) as f64 }).collect())
                .collect();
            let w = bipartite(&block);
            let a = solve_hungarian(&w).unwrap();
            a.validate(&w, Transceivers::One).unwrap();
            let (links, cost) = enumerate_best(&block);
            assert_eq!(a.len(), links, "{block:?}");
            assert_eq!(a.total_cost(), if links == 0 { 0.0 } else { cost }, "{block:?}");
        }
    }

    #[test]
    fn unequal_planes_are_padded() {
        let w = matrix(&[1, 2], &[&[INF, 5.0, 2.0], &[5.0, INF, INF], &[2.0, INF, INF]]);
        let a = solve_hungarian(&w).unwrap();
        assert_eq!(a.pairs(), &[Pair::new(0, 2, 2.0)]);
    }
}

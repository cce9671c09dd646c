//! ε-covers of a finite pseudo-metric space given by a distance matrix.
//!
//! Graphs at distance zero are merged into one class before covering; a graph lies
//! in the ball of a centre when their distance is at most `ε + BALL_SLACK`.

use crate::metrics::DistanceMatrix;
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Distances up to this value are treated as zero when merging classes.
pub const ZERO_TOL: f64 = 1e-7;
/// Slack added to ε for ball membership.
pub const BALL_SLACK: f64 = 1e-7;
/// Default class limit for [`exact_cover`].
pub const DEFAULT_EXACT_LIMIT: usize = 25;
/// Classes representable in the exact solver's bit masks.
pub const EXACT_HARD_LIMIT: usize = 128;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoverError {
    #[error("{classes} distinct classes exceed the exact-cover limit of {limit}")]
    TooLarge { classes: usize, limit: usize },
    #[error("group {0} is empty")]
    EmptyGroup(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoverMethod {
    Greedy,
    Exact,
    ConstructionTree,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverResult<T> {
    pub epsilon: T,
    pub method: CoverMethod,
    /// Graph indices of the centres, ascending.
    pub centers: Vec<usize>,
    /// Number of graphs assigned to each centre.
    pub sizes: Vec<usize>,
    /// Assigned centre (a graph index) of every graph.
    pub assignment: Vec<usize>,
}

impl<T: Scalar> CoverResult<T> {
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("cover serializes")
    }
}

/// Zero-distance classes: representative of each class, and the class of each graph.
pub fn metric_classes<T: Scalar>(dm: &DistanceMatrix<T>) -> (Vec<usize>, Vec<usize>) {
    let tol = T::lit(ZERO_TOL);
    let mut reps: Vec<usize> = Vec::new();
    let mut class_of = Vec::with_capacity(dm.len());
    for i in 0..dm.len() {
        match reps.iter().position(|&r| dm.get(i, r) <= tol) {
            Some(c) => class_of.push(c),
            None => {
                class_of.push(reps.len());
                reps.push(i);
            }
        }
    }
    (reps, class_of)
}

fn in_ball<T: Scalar>(dm: &DistanceMatrix<T>, a: usize, b: usize, eps: T) -> bool {
    dm.get(a, b) <= eps + T::lit(BALL_SLACK)
}

/// Builds the result for centre graphs `centers`, assigning every graph to its
/// nearest centre (smallest centre index on ties).
fn finish<T: Scalar>(dm: &DistanceMatrix<T>, eps: T, method: CoverMethod, mut centers: Vec<usize>) -> CoverResult<T> {
    centers.sort_unstable();
    centers.dedup();
    let assignment: Vec<usize> = (0..dm.len()).map(|i| nearest(dm, &centers, i)).collect();
    let sizes = centers
        .iter()
        .map(|&c| assignment.iter().filter(|&&a| a == c).count())
        .collect();
    CoverResult {
        epsilon: eps,
        method,
        centers,
        sizes,
        assignment,
    }
}

fn nearest<T: Scalar>(dm: &DistanceMatrix<T>, centers: &[usize], i: usize) -> usize {
    let mut best = centers[0];
    for &c in &centers[1..] {
        if dm.get(i, c) < dm.get(i, best) {
            best = c;
        }
    }
    best
}

/// Greedy set cover over balls centred at collection members.
pub fn greedy_cover<T: Scalar>(dm: &DistanceMatrix<T>, eps: T) -> CoverResult<T> {
    if dm.is_empty() {
        return finish_empty(eps, CoverMethod::Greedy);
    }
    let (reps, _) = metric_classes(dm);
    let m = reps.len();
    let mut covered = vec![false; m];
    let mut left = m;
    let mut centers = Vec::new();
    while left > 0 {
        let mut best = (0usize, 0usize);
        for a in 0..m {
            let gain = (0..m).filter(|&b| !covered[b] && in_ball(dm, reps[a], reps[b], eps)).count();
            if gain > best.1 {
                best = (a, gain);
            }
        }
        centers.push(reps[best.0]);
        for b in 0..m {
            if !covered[b] && in_ball(dm, reps[best.0], reps[b], eps) {
                covered[b] = true;
                left -= 1;
            }
        }
    }
    finish(dm, eps, CoverMethod::Greedy, centers)
}

fn finish_empty<T: Scalar>(eps: T, method: CoverMethod) -> CoverResult<T> {
    CoverResult {
        epsilon: eps,
        method,
        centers: Vec::new(),
        sizes: Vec::new(),
        assignment: Vec::new(),
    }
}

struct Exact {
    balls: Vec<u128>,
    full: u128,
    best: Vec<usize>,
}

impl Exact {
    fn packing_bound(&self, covered: u128) -> usize {
        let mut used = 0u128;
        let mut count = 0;
        let mut rest = self.full & !covered;
        while rest != 0 {
            let x = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if self.balls[x] & used == 0 {
                used |= self.balls[x];
                count += 1;
            }
        }
        count
    }

    fn search(&mut self, covered: u128, chosen: &mut Vec<usize>) {
        if covered == self.full {
            if chosen.len() < self.best.len() {
                self.best = chosen.clone();
            }
            return;
        }
        if chosen.len() + self.packing_bound(covered) >= self.best.len() {
            return;
        }
        // Branch on the uncovered class with the fewest covering centres.
        let mut rest = self.full & !covered;
        let mut pick = (usize::MAX, u32::MAX);
        while rest != 0 {
            let x = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let options = self.balls[x].count_ones();
            if options < pick.1 {
                pick = (x, options);
            }
        }
        let mut options: Vec<usize> = (0..self.balls.len()).filter(|&c| self.balls[pick.0] >> c & 1 == 1).collect();
        options.sort_by_key(|&c| std::cmp::Reverse((self.balls[c] & !covered).count_ones()));
        for c in options {
            chosen.push(c);
            self.search(covered | self.balls[c], chosen);
            chosen.pop();
        }
    }
}

/// Minimum-size cover by balls centred at collection members (branch and bound).
pub fn exact_cover<T: Scalar>(dm: &DistanceMatrix<T>, eps: T, limit: usize) -> Result<CoverResult<T>, CoverError> {
    if dm.is_empty() {
        return Ok(finish_empty(eps, CoverMethod::Exact));
    }
    let (reps, _) = metric_classes(dm);
    let m = reps.len();
    let limit_eff = limit.min(EXACT_HARD_LIMIT);
    if m > limit_eff {
        return Err(CoverError::TooLarge { classes: m, limit: limit_eff });
    }
    let balls: Vec<u128> = (0..m)
        .map(|a| (0..m).filter(|&b| in_ball(dm, reps[a], reps[b], eps)).fold(0u128, |acc, b| acc | 1 << b))
        .collect();
    let greedy = greedy_cover(dm, eps);
    let greedy_classes: Vec<usize> = greedy
        .centers
        .iter()
        .map(|c| reps.iter().position(|r| r == c).expect("greedy centres are representatives"))
        .collect();
    let full = if m == 128 { u128::MAX } else { (1u128 << m) - 1 };
    let mut s = Exact { balls, full, best: greedy_classes };
    s.search(0, &mut Vec::new());
    let centers = s.best.iter().map(|&c| reps[c]).collect();
    Ok(finish(dm, eps, CoverMethod::Exact, centers))
}

/// Cover whose centres are one member per group: the member with the smallest
/// eccentricity inside its group. `ε` is the largest member-to-centre distance.
pub fn cover_from_groups<T: Scalar>(dm: &DistanceMatrix<T>, groups: &[Vec<usize>]) -> Result<CoverResult<T>, CoverError> {
    let mut centers = Vec::with_capacity(groups.len());
    let mut eps = T::zero();
    for (gi, g) in groups.iter().enumerate() {
        let ecc = |c: usize| g.iter().map(|&x| dm.get(c, x)).fold(T::zero(), T::max);
        let c = *g
            .iter()
            .min_by(|&&a, &&b| ecc(a).partial_cmp(&ecc(b)).expect("finite distances").then(a.cmp(&b)))
            .ok_or(CoverError::EmptyGroup(gi))?;
        eps = eps.max(ecc(c));
        centers.push(c);
    }
    Ok(finish(dm, eps, CoverMethod::ConstructionTree, centers))
}

/// Nearest-centre cells of a cover.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    /// Member graphs of each cell, one cell per centre in centre order.
    pub cells: Vec<Vec<usize>>,
    /// Cell index of every graph.
    pub cell_of: Vec<usize>,
}

/// Splits the collection into nearest-centre cells, ties going to the smaller centre.
pub fn cover_to_partition<T: Scalar>(c: &CoverResult<T>, dm: &DistanceMatrix<T>) -> Partition {
    let mut cells = vec![Vec::new(); c.centers.len()];
    let mut cell_of = Vec::with_capacity(dm.len());
    if c.centers.is_empty() {
        return Partition { cells, cell_of };
    }
    for i in 0..dm.len() {
        let center = nearest(dm, &c.centers, i);
        let k = c.centers.iter().position(|&x| x == center).expect("centre listed");
        cells[k].push(i);
        cell_of.push(k);
    }
    Partition { cells, cell_of }
}

/// Largest distance between two members of a cell.
pub fn cell_diameter<T: Scalar>(dm: &DistanceMatrix<T>, cell: &[usize]) -> T {
    let mut d = T::zero();
    for &a in cell {
        for &b in cell {
            d = d.max(dm.get(a, b));
        }
    }
    d
}

/// Greedy cover sizes for ascending radii, reported as a running minimum so the
/// curve never increases: a cover at a smaller radius also covers at a larger one.
pub fn covering_curve<T: Scalar>(dm: &DistanceMatrix<T>, radii: &[T]) -> Vec<(T, usize, CoverResult<T>)> {
    let mut sorted: Vec<T> = radii.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite radii"));
    let mut out: Vec<(T, usize, CoverResult<T>)> = Vec::with_capacity(sorted.len());
    for eps in sorted {
        let mut cover = greedy_cover(dm, eps);
        if let Some((_, n, prev)) = out.last() {
            if *n < cover.len() {
                cover = CoverResult {
                    epsilon: eps,
                    ..prev.clone()
                };
            }
        }
        out.push((eps, cover.len(), cover));
    }
    out
}

//! Brute-force ground truth for tiny instances.
//!
//! Everything here is deliberately naive: explicit path enumeration by
//! depth-first search and exhaustive sums over weight configurations, with
//! no code shared with the strip solver.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};
use serde::Serialize;

use crate::environment::DistributionSpec;
use crate::error::{Error, Result};
use crate::geodesic::{CrossingPath, CrossingProblem, Topology};
use crate::lattice::{Edge, EdgeWeights, Region, Vertex};
use crate::scalar::Time;

pub const DEFAULT_PATH_CAP: usize = 1 << 21;

/// Exhaustive limit for [`exact_distribution`].
pub const MAX_EXACT_EDGES: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PathSet {
    pub paths: Vec<CrossingPath>,
    pub complete: bool,
}

impl PathSet {
    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    /// Edges used by at least one path.
    pub fn edge_union(&self) -> BTreeSet<Edge> {
        self.paths.iter().flat_map(|p| p.edges.iter().copied()).collect()
    }

    /// Edges used by every path, sorted.
    pub fn intersection(&self) -> Vec<Edge> {
        let mut iter = self.paths.iter();
        let Some(first) = iter.next() else {
            return Vec::new();
        };
        let mut common: BTreeSet<Edge> = first.edges.iter().copied().collect();
        for p in iter {
            let here: BTreeSet<Edge> = p.edges.iter().copied().collect();
            common = common.intersection(&here).copied().collect();
        }
        common.into_iter().collect()
    }

    /// Fewest edges, then lexicographically smallest sorted edge list.
    pub fn minimal_star(&self) -> Option<&CrossingPath> {
        self.paths.iter().min_by(|p, q| (p.len(), p.sorted_edges()).cmp(&(q.len(), q.sorted_edges())))
    }
}

/// Vertex walk on the problem's region; rows are lifted on the cylinder.
struct Walker {
    n: i64,
    lo: i64,
    hi: i64,
    cylinder: bool,
    k: i64,
}

impl Walker {
    fn env_row(&self, lifted: i64) -> i64 {
        if self.cylinder {
            lifted.rem_euclid(self.n)
        } else {
            lifted
        }
    }

    fn slot(&self, x: i64, lifted: i64) -> usize {
        let rows = self.hi - self.lo + 1;
        (x * rows + self.env_row(lifted) - self.lo) as usize
    }

    fn steps(&self, x: i64, y: i64) -> impl Iterator<Item = (i64, i64, Edge)> + '_ {
        let env = |r| self.env_row(r);
        let candidates = [
            (x > 0).then(|| (x - 1, y, Edge::horizontal(x - 1, env(y)))),
            (x < self.n).then(|| (x + 1, y, Edge::horizontal(x, env(y)))),
            (self.cylinder || y < self.hi).then(|| (x, y + 1, Edge::vertical(x, env(y)))),
            (self.cylinder || y > self.lo).then(|| (x, y - 1, Edge::vertical(x, env(y - 1)))),
        ];
        candidates.into_iter().flatten()
    }
}

struct Search<'a> {
    walker: &'a Walker,
    visited: Vec<bool>,
    edges: Vec<Edge>,
    vertices: Vec<Vertex>,
    out: Vec<CrossingPath>,
    cap: usize,
}

impl Search<'_> {
    fn crossing_dfs(&mut self, x: i64, y: i64, min_y: i64, max_y: i64) -> Result<()> {
        if x == self.walker.n {
            if self.out.len() == self.cap {
                return Err(Error::EnumerationOverflow { cap: self.cap });
            }
            self.out.push(CrossingPath { edges: self.edges.clone(), vertices: self.vertices.clone() });
            return Ok(());
        }
        let steps: Vec<_> = self.walker.steps(x, y).collect();
        for (nx, ny, e) in steps {
            // Only the first vertex may lie in the left column.
            if nx == 0 {
                continue;
            }
            let (lo, hi) = (min_y.min(ny), max_y.max(ny));
            if hi - lo > self.walker.k {
                continue;
            }
            let s = self.walker.slot(nx, ny);
            if self.visited[s] {
                continue;
            }
            self.enter(s, e, nx, ny);
            let r = self.crossing_dfs(nx, ny, lo, hi);
            self.leave(s);
            r?;
        }
        Ok(())
    }

    fn between_dfs(&mut self, x: i64, y: i64, target: Vertex) -> Result<()> {
        if x == target.x && y == target.y {
            if self.out.len() == self.cap {
                return Err(Error::EnumerationOverflow { cap: self.cap });
            }
            self.out.push(CrossingPath { edges: self.edges.clone(), vertices: self.vertices.clone() });
            return Ok(());
        }
        let steps: Vec<_> = self.walker.steps(x, y).collect();
        for (nx, ny, e) in steps {
            let s = self.walker.slot(nx, ny);
            if self.visited[s] {
                continue;
            }
            self.enter(s, e, nx, ny);
            let r = self.between_dfs(nx, ny, target);
            self.leave(s);
            r?;
        }
        Ok(())
    }

    fn enter(&mut self, slot: usize, e: Edge, x: i64, y: i64) {
        self.visited[slot] = true;
        self.edges.push(e);
        self.vertices.push(Vertex::new(x, y));
    }

    fn leave(&mut self, slot: usize) {
        self.visited[slot] = false;
        self.edges.pop();
        self.vertices.pop();
    }
}

fn new_search(walker: &Walker, cap: usize) -> Search<'_> {
    let size = ((walker.n + 1) * (walker.hi - walker.lo + 1)) as usize;
    Search { walker, visited: vec![false; size], edges: Vec::new(), vertices: Vec::new(), out: Vec::new(), cap }
}

/// Every simple left-right crossing of the problem whose only left-column
/// vertex is its first and only right-column vertex is its last. With
/// positive weights these contain every geodesic.
pub fn enumerate_crossings(problem: &CrossingProblem, cap: usize) -> Result<PathSet> {
    problem.validate()?;
    let cylinder = problem.topology == Topology::VerticalCylinder;
    let lo = problem.row_offset as i64;
    let hi = if cylinder { problem.n as i64 - 1 } else { lo + problem.height as i64 };
    let walker = Walker { n: problem.n as i64, lo, hi, cylinder, k: problem.k as i64 };
    let mut search = new_search(&walker, cap);
    for y in lo..=hi {
        let s = walker.slot(0, y);
        search.visited[s] = true;
        search.vertices.push(Vertex::new(0, y));
        search.crossing_dfs(0, y, y, y)?;
        search.vertices.pop();
        search.visited[s] = false;
    }
    Ok(PathSet { paths: search.out, complete: true })
}

/// Every simple path from `u` to `v` inside `region`.
pub fn enumerate_paths_between(region: Region, u: Vertex, v: Vertex, cap: usize) -> Result<PathSet> {
    for p in [u, v] {
        if !region.contains_vertex(p) {
            return Err(Error::invalid(format!("vertex ({}, {}) outside the region", p.x, p.y)));
        }
    }
    let walker = Walker { n: region.width as i64, lo: 0, hi: region.height as i64, cylinder: false, k: i64::MAX };
    let mut search = new_search(&walker, cap);
    let s = walker.slot(u.x, u.y);
    search.visited[s] = true;
    search.vertices.push(u);
    search.between_dfs(u.x, u.y, v)?;
    Ok(PathSet { paths: search.out, complete: true })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BruteForce<W> {
    pub value: W,
    pub all_geodesics: PathSet,
}

/// Minimum and minimizers over an already enumerated path set.
pub fn brute_force_over<W: Time>(weights: &EdgeWeights<W>, paths: &PathSet) -> Result<BruteForce<W>> {
    let mut best: Option<W> = None;
    let mut values = Vec::with_capacity(paths.len());
    for p in &paths.paths {
        let v = p.weight(weights).ok_or_else(|| Error::invalid("path leaves the environment"))?;
        if best.is_none_or(|b| v < b) {
            best = Some(v);
        }
        values.push(v);
    }
    let value = best.ok_or(Error::Infeasible)?;
    let geodesics = paths
        .paths
        .iter()
        .zip(&values)
        .filter(|(_, v)| v.ties(value))
        .map(|(p, _)| p.clone())
        .collect();
    Ok(BruteForce { value, all_geodesics: PathSet { paths: geodesics, complete: paths.complete } })
}

pub fn brute_force_value<W: Time>(
    weights: &EdgeWeights<W>,
    problem: &CrossingProblem,
    cap: usize,
) -> Result<BruteForce<W>> {
    problem.check_fits(weights.region())?;
    brute_force_over(weights, &enumerate_crossings(problem, cap)?)
}

pub fn brute_force_point_to_point<W: Time>(
    weights: &EdgeWeights<W>,
    u: Vertex,
    v: Vertex,
    cap: usize,
) -> Result<BruteForce<W>> {
    brute_force_over(weights, &enumerate_paths_between(weights.region(), u, v, cap)?)
}

/// Exact law of a two-point crossing value, over every configuration of
/// the edges that some crossing uses.
#[derive(Debug, Clone)]
pub struct ExactDistribution {
    problem_edges: Vec<Edge>,
    relevant: Vec<Edge>,
    /// Crossing value per configuration; bit `i` set means edge `relevant[i]` is `b`.
    values: Vec<Ratio<i64>>,
    /// Probability of a configuration with `j` heavy edges.
    config_prob: Vec<BigRational>,
    p: BigRational,
    pmf: BTreeMap<Ratio<i64>, BigRational>,
}

fn exact_ratio(x: f64) -> Result<Ratio<i64>> {
    <Ratio<i64> as Time>::from_weight(x).ok_or(Error::InexactWeight(x))
}

fn big(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or(Error::InexactWeight(x))
}

fn to_big(r: Ratio<i64>) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

pub fn exact_distribution(spec: &DistributionSpec, problem: &CrossingProblem) -> Result<ExactDistribution> {
    spec.validate()?;
    let DistributionSpec::TwoPoint { a, b, p } = *spec else {
        return Err(Error::Unsupported { operation: "exact_distribution", kind: spec.kind_name() });
    };
    let paths = enumerate_crossings(problem, DEFAULT_PATH_CAP)?;
    let relevant: Vec<Edge> = paths.edge_union().into_iter().collect();
    let m = relevant.len();
    if m > MAX_EXACT_EDGES {
        return Err(Error::TooManyEdges { edges: m, max: MAX_EXACT_EDGES });
    }
    let index: BTreeMap<Edge, usize> = relevant.iter().enumerate().map(|(i, e)| (*e, i)).collect();
    let masks: BTreeSet<(usize, u32)> = paths
        .paths
        .iter()
        .map(|path| (path.len(), path.edges.iter().fold(0u32, |acc, e| acc | (1 << index[e]))))
        .collect();
    let (a, b) = (exact_ratio(a)?, exact_ratio(b)?);
    let values: Vec<Ratio<i64>> = (0u32..(1 << m))
        .map(|config| {
            masks
                .iter()
                .map(|&(len, mask)| {
                    let heavy = (config & mask).count_ones() as i64;
                    a * (len as i64 - heavy) + b * heavy
                })
                .min()
                .expect("crossings exist")
        })
        .collect();
    let p = big(p)?;
    let q = BigRational::one() - &p;
    let config_prob: Vec<BigRational> = (0..=m)
        .map(|j| num_traits::pow(p.clone(), m - j) * num_traits::pow(q.clone(), j))
        .collect();
    let mut pmf: BTreeMap<Ratio<i64>, BigRational> = BTreeMap::new();
    for (config, v) in values.iter().enumerate() {
        let pr = &config_prob[(config as u32).count_ones() as usize];
        *pmf.entry(*v).or_insert_with(BigRational::zero) += pr;
    }
    pmf.retain(|_, pr| !pr.is_zero());
    let mut problem_edges = crate::geodesic::problem_edges(problem);
    problem_edges.sort();
    Ok(ExactDistribution { problem_edges, relevant, values, config_prob, p, pmf })
}

impl ExactDistribution {
    pub fn pmf(&self) -> &BTreeMap<Ratio<i64>, BigRational> {
        &self.pmf
    }

    pub fn relevant_edges(&self) -> &[Edge] {
        &self.relevant
    }

    pub fn total_mass(&self) -> BigRational {
        self.pmf.values().fold(BigRational::zero(), |acc, p| acc + p)
    }

    pub fn cdf(&self, x: Ratio<i64>) -> BigRational {
        self.pmf.range(..=x).fold(BigRational::zero(), |acc, (_, p)| acc + p)
    }

    pub fn mean(&self) -> BigRational {
        self.pmf.iter().fold(BigRational::zero(), |acc, (v, p)| acc + to_big(*v) * p)
    }

    pub fn variance(&self) -> BigRational {
        let mu = self.mean();
        self.pmf.iter().fold(BigRational::zero(), |acc, (v, p)| {
            let d = to_big(*v) - &mu;
            acc + &d * &d * p
        })
    }

    /// `sup{x : P(X <= x) <= α}`: the first atom whose cdf exceeds `α`.
    pub fn quantile(&self, alpha: f64) -> Result<Ratio<i64>> {
        if !(0.0..1.0).contains(&alpha) {
            return Err(Error::invalid(format!("quantile level {alpha} outside [0, 1)")));
        }
        let alpha = big(alpha)?;
        let mut cdf = BigRational::zero();
        for (v, p) in &self.pmf {
            cdf += p;
            if cdf > alpha {
                return Ok(*v);
            }
        }
        unreachable!("total mass is one")
    }

    fn prob(&self, config: usize) -> &BigRational {
        &self.config_prob[(config as u32).count_ones() as usize]
    }

    fn indicator(&self, q: Ratio<i64>) -> Vec<bool> {
        self.values.iter().map(|v| *v >= q).collect()
    }

    /// Exact `P(f != f∘σ_e)` for `f = 1{value >= q}`, for every edge of the
    /// problem in edge order (zero for edges no crossing uses).
    pub fn influences(&self, q: Ratio<i64>) -> Vec<(Edge, BigRational)> {
        let f = self.indicator(q);
        let mut by_edge: BTreeMap<Edge, BigRational> =
            self.problem_edges.iter().map(|e| (*e, BigRational::zero())).collect();
        for (i, e) in self.relevant.iter().enumerate() {
            let bit = 1usize << i;
            let mut total = BigRational::zero();
            for config in 0..f.len() {
                if f[config] != f[config ^ bit] {
                    total += self.prob(config);
                }
            }
            by_edge.insert(*e, total);
        }
        by_edge.into_iter().collect()
    }

    pub fn sum_of_squared_influences(&self, q: Ratio<i64>) -> BigRational {
        self.influences(q).into_iter().fold(BigRational::zero(), |acc, (_, inf)| acc + &inf * &inf)
    }

    /// Exact `E[f(t) f(t^ε)] - E[f(t)]^2` for `f = 1{value >= q}`.
    pub fn noise_covariance(&self, q: Ratio<i64>, eps: f64) -> Result<BigRational> {
        if !(0.0..=1.0).contains(&eps) {
            return Err(Error::invalid(format!("noise level {eps} outside [0, 1]")));
        }
        let eps = big(eps)?;
        let keep = BigRational::one() - &eps;
        let q_b = BigRational::one() - &self.p;
        let f = self.indicator(q);
        let one = |x: bool| if x { BigRational::one() } else { BigRational::zero() };
        // Apply the one-edge noise operator coordinate by coordinate.
        let mut g: Vec<BigRational> = f.iter().map(|&x| one(x)).collect();
        for i in 0..self.relevant.len() {
            let bit = 1usize << i;
            for light in 0..g.len() {
                if light & bit != 0 {
                    continue;
                }
                let heavy = light | bit;
                let avg = &self.p * &g[light] + &q_b * &g[heavy];
                let fresh = &eps * &avg;
                g[light] = &keep * &g[light] + &fresh;
                g[heavy] = &keep * &g[heavy] + &fresh;
            }
        }
        let mut joint = BigRational::zero();
        let mut mean = BigRational::zero();
        for config in 0..f.len() {
            if f[config] {
                let pr = self.prob(config);
                joint += pr * &g[config];
                mean += pr;
            }
        }
        Ok(joint - &mean * &mean)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Orientation;

    fn r(n: i64, d: i64) -> Ratio<i64> {
        Ratio::new(n, d)
    }

    fn br(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn row_counts_for_zero_displacement() {
        assert_eq!(enumerate_crossings(&CrossingProblem::tau(1, 0).unwrap(), 100).unwrap().len(), 2);
        assert_eq!(enumerate_crossings(&CrossingProblem::tau(2, 0).unwrap(), 100).unwrap().len(), 3);
        assert!(matches!(
            enumerate_crossings(&CrossingProblem::tau(2, 0).unwrap(), 1),
            Err(Error::EnumerationOverflow { cap: 1 })
        ));
    }

    #[test]
    fn crossings_are_simple_and_within_bound() {
        for k in 0..=3 {
            let p = CrossingProblem::tau(3, k).unwrap();
            let set = enumerate_crossings(&p, DEFAULT_PATH_CAP).unwrap();
            let mut seen = BTreeSet::new();
            for path in &set.paths {
                let rows: Vec<i64> = path.vertices.iter().map(|v| v.y).collect();
                assert!(rows.iter().max().unwrap() - rows.iter().min().unwrap() <= k as i64);
                let distinct: BTreeSet<Vertex> = path.vertices.iter().copied().collect();
                assert_eq!(distinct.len(), path.vertices.len());
                assert!(seen.insert(path.edges.clone()));
            }
        }
    }

    #[test]
    fn cylinder_has_parallel_wrap_edges() {
        // Circumference 2: rows 0 and 1 are joined by two distinct edges.
        let p = CrossingProblem::tau_cylinder(2, 1).unwrap();
        let set = enumerate_crossings(&p, DEFAULT_PATH_CAP).unwrap();
        let up = set.paths.iter().any(|q| q.edges.contains(&Edge::vertical(1, 0)));
        let wrap = set.paths.iter().any(|q| q.edges.contains(&Edge::vertical(1, 1)));
        assert!(up && wrap);
    }

    #[test]
    fn all_ones_square_has_three_row_geodesics() {
        let w = EdgeWeights::constant(Region::square(2), 1i64);
        let bf = brute_force_value(&w, &CrossingProblem::tau(2, 2).unwrap(), DEFAULT_PATH_CAP).unwrap();
        assert_eq!(bf.value, 2);
        assert_eq!(bf.all_geodesics.len(), 3);
        assert!(bf.all_geodesics.intersection().is_empty());
        let star = bf.all_geodesics.minimal_star().unwrap();
        assert_eq!(star.edges, vec![Edge::horizontal(0, 0), Edge::horizontal(1, 0)]);
    }

    #[test]
    fn point_to_point_enumeration() {
        let w = EdgeWeights::constant(Region::square(2), 1i64);
        let bf = brute_force_point_to_point(&w, Vertex::new(0, 0), Vertex::new(0, 0), 10).unwrap();
        assert_eq!(bf.value, 0);
        let bf = brute_force_point_to_point(&w, Vertex::new(0, 0), Vertex::new(2, 0), 1000).unwrap();
        assert_eq!(bf.value, 2);
    }

    #[test]
    fn unit_square_closed_forms() {
        let spec = DistributionSpec::two_point(1.0, 2.0, 0.5).unwrap();
        let d = exact_distribution(&spec, &CrossingProblem::full(1).unwrap()).unwrap();
        assert_eq!(d.total_mass(), BigRational::one());
        assert_eq!(d.pmf()[&r(1, 1)], br(3, 4));
        assert_eq!(d.pmf()[&r(2, 1)], br(1, 4));
        assert_eq!(d.quantile(0.9).unwrap(), r(2, 1));
        assert_eq!(d.quantile(0.5).unwrap(), r(1, 1));
        let q = r(2, 1);
        for (e, inf) in d.influences(q) {
            match e.orientation {
                Orientation::Horizontal => assert_eq!(inf, br(1, 2)),
                Orientation::Vertical => assert!(inf.is_zero()),
            }
        }
        assert_eq!(d.sum_of_squared_influences(q), br(1, 2));
        assert_eq!(d.noise_covariance(q, 0.5).unwrap(), br(5, 64));
        assert_eq!(d.noise_covariance(q, 1.0).unwrap(), BigRational::zero());
        assert_eq!(d.noise_covariance(q, 0.0).unwrap(), br(3, 16));
    }

    #[test]
    fn too_many_edges_is_rejected() {
        let spec = DistributionSpec::two_point(1.0, 2.0, 0.5).unwrap();
        assert!(matches!(
            exact_distribution(&spec, &CrossingProblem::full(4).unwrap()),
            Err(Error::TooManyEdges { .. })
        ));
        let uniform = DistributionSpec::uniform(1.0, 2.0).unwrap();
        assert!(matches!(
            exact_distribution(&uniform, &CrossingProblem::full(1).unwrap()),
            Err(Error::Unsupported { .. })
        ));
    }
}

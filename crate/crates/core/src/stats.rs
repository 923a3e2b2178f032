//! Monte Carlo estimators: quantiles, moments, small-ball masses, noise
//! covariance and influences of threshold events.

use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::environment::{DistributionSpec, Environment};
use crate::error::{Error, Result};
use crate::geodesic::{problem_edges, CrossingProblem, CrossingSolver};
use crate::lattice::{Edge, EdgeWeights};
use crate::rng::{derive_seed, standard_normal_quantile, streams, CounterStream};
use crate::scalar::Time;
use crate::solve::{crossing_value, visit_weights, WeightVisitor};

pub const DEFAULT_LEVEL: f64 = 0.99;
pub const DEFAULT_BOOTSTRAP_RESAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CiMethod {
    Normal,
    Bootstrap,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimateWithCI {
    pub point: f64,
    pub n_samples: usize,
    pub half_width: f64,
    pub method: CiMethod,
    pub level: f64,
}

impl EstimateWithCI {
    pub fn normal(point: f64, n_samples: usize, std_error: f64, level: f64) -> Self {
        let half_width = (z_value(level) * std_error).max(0.0);
        Self { point, n_samples, half_width, method: CiMethod::Normal, level }
    }

    pub fn lo(&self) -> f64 {
        self.point - self.half_width
    }

    pub fn hi(&self) -> f64 {
        self.point + self.half_width
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo() <= x && x <= self.hi()
    }

    /// `self` lies entirely below `other`.
    pub fn strictly_below(&self, other: &EstimateWithCI) -> bool {
        self.hi() < other.lo()
    }
}

/// Two-sided normal critical value for a confidence level.
pub fn z_value(level: f64) -> f64 {
    standard_normal_quantile(0.5 + level / 2.0)
}

/// Sum with pairwise splitting, so the rounding pattern depends only on the
/// input order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let (l, r) = xs.split_at(xs.len() / 2);
    pairwise_sum(l) + pairwise_sum(r)
}

fn mean_of(xs: &[f64]) -> f64 {
    pairwise_sum(xs) / xs.len() as f64
}

fn central_moment(xs: &[f64], mean: f64, power: i32) -> f64 {
    let d: Vec<f64> = xs.iter().map(|x| (x - mean).powi(power)).collect();
    pairwise_sum(&d) / xs.len() as f64
}

fn unbiased_variance(xs: &[f64]) -> f64 {
    let m = mean_of(xs);
    let d: Vec<f64> = xs.iter().map(|x| (x - m) * (x - m)).collect();
    pairwise_sum(&d) / (xs.len() - 1) as f64
}

/// `q_α = sup{x : P(X <= x) <= α}` for the empirical law of `samples`.
pub fn quantile(samples: &[f64], alpha: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::invalid("quantile of an empty sample"));
    }
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::invalid(format!("quantile level {alpha} outside [0, 1)")));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = BigRational::from_integer(sorted.len().into());
    let alpha = BigRational::from_float(alpha).expect("finite level");
    let bound = alpha * n;
    // The answer is the first sample value whose empirical cdf exceeds α.
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        if BigRational::from_integer((j + 1).into()) > bound {
            return Ok(sorted[i]);
        }
        i = j + 1;
    }
    unreachable!("the empirical cdf reaches one")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub mean: EstimateWithCI,
    pub variance: EstimateWithCI,
}

/// Mean and unbiased variance with normal-approximation intervals at the
/// default level.
pub fn summarize(samples: &[f64]) -> Result<Summary> {
    summarize_with(samples, DEFAULT_LEVEL, CiMethod::Normal, 0)
}

/// As [`summarize`]; with [`CiMethod::Bootstrap`] the variance interval uses
/// the spread of 1000 bootstrap replicates drawn from `seed`.
pub fn summarize_with(samples: &[f64], level: f64, method: CiMethod, seed: u64) -> Result<Summary> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::invalid(format!("summary needs at least 2 samples, got {n}")));
    }
    let m = mean_of(samples);
    let var = unbiased_variance(samples);
    let mean = EstimateWithCI::normal(m, n, (var / n as f64).sqrt(), level);
    let variance = match method {
        CiMethod::Normal => {
            // Var(s^2) ≈ (μ4 - σ^4 (n-3)/(n-1)) / n
            let m4 = central_moment(samples, m, 4);
            let nf = n as f64;
            let v = (m4 - var * var * (nf - 3.0) / (nf - 1.0)) / nf;
            EstimateWithCI::normal(var, n, v.max(0.0).sqrt(), level)
        }
        CiMethod::Bootstrap => {
            let reps: Vec<f64> = (0..DEFAULT_BOOTSTRAP_RESAMPLES as u64)
                .into_par_iter()
                .map(|b| {
                    let mut rng = CounterStream::new(derive_seed(seed, &[b]), streams::BOOTSTRAP, 0);
                    let resample: Vec<f64> = (0..n)
                        .map(|_| samples[((rng.next_u64() as u128 * n as u128) >> 64) as usize])
                        .collect();
                    unbiased_variance(&resample)
                })
                .collect();
            let sd = unbiased_variance(&reps).sqrt();
            EstimateWithCI { point: var, n_samples: n, half_width: z_value(level) * sd, method, level }
        }
    };
    Ok(Summary { mean, variance })
}

/// Empirical `P(X ∈ [x, x + w])` with a binomial interval.
pub fn interval_mass(samples: &[f64], x: f64, w: f64) -> Result<EstimateWithCI> {
    if !(w > 0.0) {
        return Err(Error::invalid(format!("interval width {w} must be positive")));
    }
    if samples.is_empty() {
        return Err(Error::invalid("interval mass of an empty sample"));
    }
    let hits = samples.iter().filter(|&&s| x <= s && s <= x + w).count();
    Ok(proportion(hits, samples.len(), DEFAULT_LEVEL))
}

/// Binomial proportion with a normal interval.
pub fn proportion(hits: usize, n: usize, level: f64) -> EstimateWithCI {
    let p = hits as f64 / n as f64;
    EstimateWithCI::normal(p, n, (p * (1.0 - p) / n as f64).sqrt(), level)
}

/// The event `{value >= threshold}` for a crossing problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdFunction {
    pub problem: CrossingProblem,
    pub threshold: f64,
}

impl ThresholdFunction {
    pub fn new(problem: CrossingProblem, threshold: f64) -> Self {
        Self { problem, threshold }
    }

    pub fn evaluate(&self, env: &Environment) -> Result<bool> {
        Ok(crossing_value(env, &self.problem)? >= self.threshold)
    }
}

/// Crossing values of `reps` independent environments; replicate `i` uses
/// seed `derive_seed(seed, [i])`.
pub fn sample_values(spec: &DistributionSpec, problem: &CrossingProblem, reps: usize, seed: u64) -> Result<Vec<f64>> {
    let region = problem.region();
    (0..reps as u64)
        .into_par_iter()
        .map(|i| crossing_value(&Environment::sample(*spec, region, derive_seed(seed, &[i]))?, problem))
        .collect()
}

/// `q̂_α` of the crossing value from an independent calibration sample.
pub fn calibrate_quantile(
    spec: &DistributionSpec,
    problem: &CrossingProblem,
    alpha: f64,
    reps: usize,
    seed: u64,
) -> Result<f64> {
    quantile(&sample_values(spec, problem, reps, seed)?, alpha)
}

/// Monte Carlo `E[f(t) f(t^ε)] - E[f(t)]^2`.
///
/// Replicate `i` evaluates `f` on an environment and its resampled copy; the
/// point estimate is the unbiased sample covariance of those pairs and the
/// interval uses the delta-method standard error
/// `sd((X - X̄)(Y - Ȳ)) / sqrt(R)`.
pub fn noise_covariance(
    f: &ThresholdFunction,
    spec: &DistributionSpec,
    eps: f64,
    reps: usize,
    seed: u64,
) -> Result<EstimateWithCI> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::invalid(format!("noise level {eps} outside [0, 1]")));
    }
    if reps < 2 {
        return Err(Error::invalid("noise covariance needs at least 2 replicates"));
    }
    let region = f.problem.region();
    let pairs: Vec<(f64, f64)> = (0..reps as u64)
        .into_par_iter()
        .map(|i| {
            let env = Environment::sample(*spec, region, derive_seed(seed, &[i, 0]))?;
            let noisy = env.resampled(eps, derive_seed(seed, &[i, 1]))?;
            let x = f.evaluate(&env)? as u8 as f64;
            let y = f.evaluate(&noisy)? as u8 as f64;
            Ok((x, y))
        })
        .collect::<Result<_>>()?;
    let r = pairs.len() as f64;
    let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let (mx, my) = (mean_of(&xs), mean_of(&ys));
    let z: Vec<f64> = pairs.iter().map(|&(x, y)| (x - mx) * (y - my)).collect();
    let point = pairwise_sum(&z) / (r - 1.0);
    let se = (unbiased_variance(&z) / r).sqrt();
    Ok(EstimateWithCI::normal(point, pairs.len(), se, DEFAULT_LEVEL))
}

struct FlipScan {
    problem: CrossingProblem,
    threshold: f64,
    atoms: (f64, f64),
}

impl WeightVisitor for FlipScan {
    type Output = Vec<Edge>;

    fn visit<W: Time>(self, weights: &EdgeWeights<W>) -> Result<Vec<Edge>> {
        let q = W::from_weight(self.threshold).ok_or(Error::InexactWeight(self.threshold))?;
        let a = W::from_weight(self.atoms.0).ok_or(Error::InexactWeight(self.atoms.0))?;
        let b = W::from_weight(self.atoms.1).ok_or(Error::InexactWeight(self.atoms.1))?;
        let solver = CrossingSolver::new(weights, self.problem)?;
        let region = weights.region();
        let mut changed = Vec::new();
        if solver.value() >= q {
            // Only b -> a flips can push the value below q.
            let lowered = solver.lowered_values(a);
            for (id, w) in weights.values().iter().enumerate() {
                if *w == b && lowered[id] < q {
                    changed.push(region.edge(id));
                }
            }
        } else {
            // Raising an edge off π leaves the value alone.
            let pi = solver.intersection();
            for pivot in &pi {
                if weights.at(pivot.edge) == Some(a) && solver.raised_value(&pi, pivot.edge, b) >= q {
                    changed.push(pivot.edge);
                }
            }
        }
        changed.sort();
        Ok(changed)
    }
}

/// Edges whose flip `a <-> b` changes `f` on this environment.
pub fn flip_changes(f: &ThresholdFunction, env: &Environment) -> Result<Vec<Edge>> {
    let atoms = env
        .spec()
        .atoms()
        .ok_or(Error::Unsupported { operation: "influences", kind: env.spec().kind_name() })?;
    visit_weights(env, FlipScan { problem: f.problem, threshold: f.threshold, atoms })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InfluenceReport {
    /// Every edge the problem reads, in edge order.
    pub edges: Vec<(Edge, EstimateWithCI)>,
    pub sum_of_squares: EstimateWithCI,
}

/// Per-edge `Inf_e(f) = P(f(t) != f(σ_e t))` and `Σ Inf_e^2`.
///
/// All flips of one replicate share its environment. The sum of squares is
/// the unbiased U-statistic `Σ_e S_e (S_e - 1) / (R (R - 1))` for flip
/// counts `S_e`, with a delta-method interval.
pub fn influences(f: &ThresholdFunction, spec: &DistributionSpec, reps: usize, seed: u64) -> Result<InfluenceReport> {
    if !spec.is_two_point() {
        return Err(Error::Unsupported { operation: "influences", kind: spec.kind_name() });
    }
    if reps < 2 {
        return Err(Error::invalid("influences need at least 2 replicates"));
    }
    let region = f.problem.region();
    let per_rep: Vec<Vec<Edge>> = (0..reps as u64)
        .into_par_iter()
        .map(|i| flip_changes(f, &Environment::sample(*spec, region, derive_seed(seed, &[i]))?))
        .collect::<Result<_>>()?;
    let edges = problem_edges(&f.problem);
    let index: std::collections::BTreeMap<Edge, usize> = edges.iter().enumerate().map(|(i, e)| (*e, i)).collect();
    let mut counts = vec![0usize; edges.len()];
    for changed in &per_rep {
        for e in changed {
            counts[index[e]] += 1;
        }
    }
    let r = reps as f64;
    let p_hat: Vec<f64> = counts.iter().map(|&s| s as f64 / r).collect();
    let u_terms: Vec<f64> = counts.iter().map(|&s| (s as f64) * (s as f64 - 1.0)).collect();
    let point = pairwise_sum(&u_terms) / (r * (r - 1.0));
    let g: Vec<f64> = per_rep
        .iter()
        .map(|changed| pairwise_sum(&changed.iter().map(|e| p_hat[index[e]]).collect::<Vec<_>>()))
        .collect();
    let se = 2.0 * (unbiased_variance(&g) / r).sqrt();
    let sum_of_squares = EstimateWithCI::normal(point, reps, se, DEFAULT_LEVEL);
    let edges = edges
        .into_iter()
        .zip(&counts)
        .map(|(e, &s)| (e, proportion(s, reps, DEFAULT_LEVEL)))
        .collect();
    Ok(InfluenceReport { edges, sum_of_squares })
}

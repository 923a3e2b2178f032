use std::collections::BTreeMap;

use rayon::prelude::*;

use super::config::ExperimentKind;
use super::{num, CalibrationRecord, Run, StreamRole};
use crate::environment::{cylinder_shift_field, Environment};
use crate::error::Result;
use crate::geodesic::{
    column_intersections, path_geometry, point_to_point_time, CrossingProblem, CrossingSolver, DEFAULT_CANONICAL_CAP,
};
use crate::lattice::{EdgeWeights, Orientation, Region, Vertex};
use crate::rng::derive_seed;
use crate::scalar::Time;
use crate::solve::{crossing_value, visit_weights, WeightVisitor};
use crate::stats::{self, proportion, summarize, ThresholdFunction, DEFAULT_LEVEL};

const VARIANCE: &[&str] = &["n", "k", "reps", "mean", "var", "var_ci_lo", "var_ci_hi"];
const NOISE: &[&str] = &["n", "k", "alpha", "q_hat", "eps", "reps", "cov", "cov_ci_lo", "cov_ci_hi"];
const INFLUENCE: &[&str] =
    &["n", "k", "alpha", "q_hat", "reps", "sum_inf2", "sum_inf2_ci_lo", "sum_inf2_ci_hi", "max_inf"];
const INFLUENCE_MAP: &[&str] = &["n", "k", "alpha", "x", "y", "orientation", "inf", "inf_ci_lo", "inf_ci_hi"];
const TAIL: &[&str] = &[
    "n",
    "k",
    "alpha",
    "q_hat",
    "reps",
    "tail",
    "tail_ci_lo",
    "tail_ci_hi",
    "tail_bound",
    "monotone_violations",
    "r0_mismatches",
];
const LADDER: &[&str] = &[
    "n",
    "k",
    "alpha",
    "x",
    "width",
    "mass_rect",
    "mass_rect_ci_lo",
    "mass_rect_ci_hi",
    "mass_tau",
    "mass_tau_ci_lo",
    "mass_tau_ci_hi",
];
const SHIFT: &[&str] = &["n", "k", "r", "reps", "mean", "mean_ci_lo", "mean_ci_hi"];
const GEOMETRY: &[&str] = &[
    "n",
    "k",
    "reps",
    "mean_displacement",
    "max_displacement",
    "mean_max_column_pi",
    "mean_b_fraction",
    "p_tau_eq_full",
    "p_tau_ne_cyl",
    "p_tau_ne_cyl_ci_lo",
    "p_tau_ne_cyl_ci_hi",
    "canonical_exact_fraction",
];
const GEOMETRY_HIST: &[&str] = &["n", "k", "statistic", "value", "count"];
const SHAPE: &[&str] = &[
    "n",
    "h",
    "dy",
    "reps",
    "mu_hat",
    "mu_ci_lo",
    "mu_ci_hi",
    "curvature",
    "curvature_ci_lo",
    "curvature_ci_hi",
];

/// Ladder steps below `q̂` for the small-ball masses.
const LADDER_STEPS: usize = 5;
const LADDER_WIDTH: f64 = 1.0;

pub(super) fn tables(kind: ExperimentKind) -> &'static [(&'static str, &'static [&'static str])] {
    match kind {
        ExperimentKind::VarianceSweep => &[("variance-sweep", VARIANCE)],
        ExperimentKind::NoiseSweep => &[("noise-sweep", NOISE)],
        ExperimentKind::InfluenceProfile => &[("influence-profile", INFLUENCE), ("influence-map", INFLUENCE_MAP)],
        ExperimentKind::SmallballTail => {
            &[("smallball-tail", TAIL), ("smallball-ladder", LADDER), ("smallball-shift", SHIFT)]
        }
        ExperimentKind::Geometry => &[("geometry", GEOMETRY), ("geometry-hist", GEOMETRY_HIST)],
        ExperimentKind::Shape => &[("shape", SHAPE)],
    }
}

pub(super) fn summary(kind: ExperimentKind) -> &'static str {
    match kind {
        ExperimentKind::VarianceSweep => "mean and variance of tau(n,k) with 99% intervals",
        ExperimentKind::NoiseSweep => "covariance of 1{tau(n,k) >= q_alpha} under eps-resampling",
        ExperimentKind::InfluenceProfile => "per-edge influences of 1{tau(n,k) >= q_alpha} and their sum of squares",
        ExperimentKind::SmallballTail => {
            "P(T(n,k) < q_alpha(tau(n,k))) against (4k/n)|log(1-alpha)|, small-ball masses, and the shifted T_r ladder"
        }
        ExperimentKind::Geometry => {
            "geodesic displacement, column intersections of pi, b-edge fraction, P(T_n = tau), P(tau != cylinder tau)"
        }
        ExperimentKind::Shape => "time-constant estimates T(0, n(1,h))/n on a direction fan with a curvature proxy",
    }
}

pub(super) fn execute(run: &mut Run) -> Result<()> {
    match run.config.kind {
        ExperimentKind::VarianceSweep => variance_sweep(run),
        ExperimentKind::NoiseSweep => noise_sweep(run),
        ExperimentKind::InfluenceProfile => influence_profile(run),
        ExperimentKind::SmallballTail => smallball_tail(run),
        ExperimentKind::Geometry => geometry(run),
        ExperimentKind::Shape => shape(run),
    }
}

fn calibrate(run: &mut Run, n: usize, k: usize, alpha: f64) -> Result<f64> {
    let reps = run.config.calibration_reps;
    let seed = run.seed(StreamRole::Calibration, format!("n={n} k={k} alpha={alpha}"));
    let q_hat = stats::calibrate_quantile(&run.config.spec, &CrossingProblem::tau(n, k)?, alpha, reps, seed)?;
    run.calibration.push(CalibrationRecord { n, k, alpha, reps, seed, q_hat });
    Ok(q_hat)
}

fn variance_sweep(run: &mut Run) -> Result<()> {
    let config = run.config;
    for n in config.grid.n_values() {
        for k in config.grid.k_values(n) {
            let seed = run.seed(StreamRole::Evaluation, format!("n={n} k={k}"));
            let values = stats::sample_values(&config.spec, &CrossingProblem::tau(n, k)?, config.reps, seed)?;
            let s = summarize(&values)?;
            run.table("variance-sweep").row(vec![
                n.to_string(),
                k.to_string(),
                config.reps.to_string(),
                num(s.mean.point),
                num(s.variance.point),
                num(s.variance.lo()),
                num(s.variance.hi()),
            ])?;
        }
    }
    Ok(())
}

fn noise_sweep(run: &mut Run) -> Result<()> {
    let config = run.config;
    for n in config.grid.n_values() {
        for k in config.grid.k_values(n) {
            for alpha in config.grid.alpha_values() {
                let q_hat = calibrate(run, n, k, alpha)?;
                let f = ThresholdFunction::new(CrossingProblem::tau(n, k)?, q_hat);
                for eps in config.grid.eps_values() {
                    let seed = run.seed(StreamRole::Evaluation, format!("n={n} k={k} alpha={alpha} eps={eps}"));
                    let est = stats::noise_covariance(&f, &config.spec, eps, config.reps, seed)?;
                    run.table("noise-sweep").row(vec![
                        n.to_string(),
                        k.to_string(),
                        num(alpha),
                        num(q_hat),
                        num(eps),
                        config.reps.to_string(),
                        num(est.point),
                        num(est.lo()),
                        num(est.hi()),
                    ])?;
                }
            }
        }
    }
    Ok(())
}

fn influence_profile(run: &mut Run) -> Result<()> {
    let config = run.config;
    for n in config.grid.n_values() {
        for k in config.grid.k_values(n) {
            for alpha in config.grid.alpha_values() {
                let q_hat = calibrate(run, n, k, alpha)?;
                let f = ThresholdFunction::new(CrossingProblem::tau(n, k)?, q_hat);
                let seed = run.seed(StreamRole::Evaluation, format!("n={n} k={k} alpha={alpha}"));
                let report = stats::influences(&f, &config.spec, config.reps, seed)?;
                let max_inf = report.edges.iter().map(|(_, e)| e.point).fold(0.0, f64::max);
                let ssq = report.sum_of_squares;
                run.table("influence-profile").row(vec![
                    n.to_string(),
                    k.to_string(),
                    num(alpha),
                    num(q_hat),
                    config.reps.to_string(),
                    num(ssq.point),
                    num(ssq.lo()),
                    num(ssq.hi()),
                    num(max_inf),
                ])?;
                let map = run.table("influence-map");
                for (edge, est) in &report.edges {
                    let orientation = match edge.orientation {
                        Orientation::Horizontal => "horizontal",
                        Orientation::Vertical => "vertical",
                    };
                    map.row(vec![
                        n.to_string(),
                        k.to_string(),
                        num(alpha),
                        edge.x.to_string(),
                        edge.y.to_string(),
                        orientation.to_string(),
                        num(est.point),
                        num(est.lo()),
                        num(est.hi()),
                    ])?;
                }
            }
        }
    }
    Ok(())
}

struct TailSample {
    rect: f64,
    tau: f64,
    shifted: Vec<f64>,
    r0_identical: bool,
}

fn smallball_tail(run: &mut Run) -> Result<()> {
    let config = run.config;
    let rs = config.grid.r_values();
    for n in config.grid.n_values() {
        for k in config.grid.k_values(n) {
            let rect = CrossingProblem::rect(n, k)?;
            let tau = CrossingProblem::tau(n, k)?;
            let fields = rs.iter().map(|&r| cylinder_shift_field(r, n, k)).collect::<Result<Vec<_>>>()?;
            let seed = run.seed(StreamRole::Evaluation, format!("n={n} k={k}"));
            let samples: Vec<TailSample> = (0..config.reps as u64)
                .into_par_iter()
                .map(|i| {
                    let env = Environment::sample(config.spec, Region::square(n), derive_seed(seed, &[i]))?;
                    let mut shifted = Vec::with_capacity(fields.len());
                    let mut r0_identical = true;
                    for (r, field) in rs.iter().zip(&fields) {
                        let env_r = env.shifted(field)?;
                        if *r == 0.0 {
                            r0_identical = env_r == env;
                        }
                        shifted.push(crossing_value(&env_r, &rect)?);
                    }
                    Ok(TailSample {
                        rect: crossing_value(&env, &rect)?,
                        tau: crossing_value(&env, &tau)?,
                        shifted,
                        r0_identical,
                    })
                })
                .collect::<Result<_>>()?;
            let violations: usize =
                samples.iter().map(|s| s.shifted.windows(2).filter(|w| w[1] < w[0]).count()).sum();
            let r0_mismatches = samples.iter().filter(|s| !s.r0_identical).count();
            let rect_values: Vec<f64> = samples.iter().map(|s| s.rect).collect();
            let tau_values: Vec<f64> = samples.iter().map(|s| s.tau).collect();
            for (j, r) in rs.iter().enumerate() {
                let values: Vec<f64> = samples.iter().map(|s| s.shifted[j]).collect();
                let s = summarize(&values)?;
                run.table("smallball-shift").row(vec![
                    n.to_string(),
                    k.to_string(),
                    num(*r),
                    config.reps.to_string(),
                    num(s.mean.point),
                    num(s.mean.lo()),
                    num(s.mean.hi()),
                ])?;
            }
            for alpha in config.grid.alpha_values() {
                let q_hat = calibrate(run, n, k, alpha)?;
                let below = rect_values.iter().filter(|&&t| t < q_hat).count();
                let tail = proportion(below, config.reps, DEFAULT_LEVEL);
                let bound = 4.0 * k as f64 / n as f64 * (1.0 - alpha).ln().abs();
                run.table("smallball-tail").row(vec![
                    n.to_string(),
                    k.to_string(),
                    num(alpha),
                    num(q_hat),
                    config.reps.to_string(),
                    num(tail.point),
                    num(tail.lo()),
                    num(tail.hi()),
                    num(bound),
                    violations.to_string(),
                    r0_mismatches.to_string(),
                ])?;
                for step in 1..=LADDER_STEPS {
                    let x = q_hat - step as f64 * LADDER_WIDTH;
                    let m_rect = stats::interval_mass(&rect_values, x, LADDER_WIDTH)?;
                    let m_tau = stats::interval_mass(&tau_values, x, LADDER_WIDTH)?;
                    run.table("smallball-ladder").row(vec![
                        n.to_string(),
                        k.to_string(),
                        num(alpha),
                        num(x),
                        num(LADDER_WIDTH),
                        num(m_rect.point),
                        num(m_rect.lo()),
                        num(m_rect.hi()),
                        num(m_tau.point),
                        num(m_tau.lo()),
                        num(m_tau.hi()),
                    ])?;
                }
            }
        }
    }
    Ok(())
}

/// Per-replicate geometry statistics of one environment.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometrySample {
    pub displacement: i64,
    pub max_column_pi: usize,
    pub b_fraction: Option<f64>,
    pub tau_eq_full: bool,
    pub tau_ne_cyl: Option<bool>,
    pub canonical_exact: bool,
}

struct GeometryScan<'a> {
    env: &'a Environment,
    n: usize,
    k: usize,
}

impl WeightVisitor for GeometryScan<'_> {
    type Output = GeometrySample;

    fn visit<W: Time>(self, weights: &EdgeWeights<W>) -> Result<GeometrySample> {
        let (n, k) = (self.n, self.k);
        let solver = CrossingSolver::new(weights, CrossingProblem::tau(n, k)?)?;
        let tau = solver.value();
        let canonical = solver.canonical(DEFAULT_CANONICAL_CAP);
        let path = canonical.result.path.expect("canonical geodesics carry paths");
        let geometry = path_geometry(&path, Some(self.env));
        let pi: Vec<_> = solver.intersection().into_iter().map(|p| p.edge).collect();
        let max_column_pi = column_intersections(&pi).values().copied().max().unwrap_or(0);
        let full = CrossingSolver::new(weights, CrossingProblem::full(n)?)?.value();
        let tau_ne_cyl = if k < n {
            let cyl = CrossingSolver::new(weights, CrossingProblem::tau_cylinder(n, k)?)?.value();
            Some(!cyl.ties(tau))
        } else {
            None
        };
        Ok(GeometrySample {
            displacement: geometry.displacement,
            max_column_pi,
            b_fraction: geometry.b_edge_count.map(|b| b as f64 / path.len() as f64),
            tau_eq_full: full.ties(tau),
            tau_ne_cyl,
            canonical_exact: canonical.exact,
        })
    }
}

pub fn geometry_sample(env: &Environment, n: usize, k: usize) -> Result<GeometrySample> {
    visit_weights(env, GeometryScan { env, n, k })
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = xs.collect();
    stats::pairwise_sum(&v) / v.len() as f64
}

fn geometry(run: &mut Run) -> Result<()> {
    let config = run.config;
    for n in config.grid.n_values() {
        for k in config.grid.k_values(n) {
            let seed = run.seed(StreamRole::Evaluation, format!("n={n} k={k}"));
            let samples: Vec<GeometrySample> = (0..config.reps as u64)
                .into_par_iter()
                .map(|i| {
                    let env = Environment::sample(config.spec, Region::square(n), derive_seed(seed, &[i]))?;
                    geometry_sample(&env, n, k)
                })
                .collect::<Result<_>>()?;
            let reps = samples.len();
            let b_fraction = if config.spec.is_two_point() {
                num(mean(samples.iter().map(|s| s.b_fraction.unwrap_or(0.0))))
            } else {
                String::new()
            };
            let cyl: Vec<String> = if k < n {
                let hits = samples.iter().filter(|s| s.tau_ne_cyl == Some(true)).count();
                let p = proportion(hits, reps, DEFAULT_LEVEL);
                vec![num(p.point), num(p.lo()), num(p.hi())]
            } else {
                vec![String::new(); 3]
            };
            let mut row = vec![
                n.to_string(),
                k.to_string(),
                reps.to_string(),
                num(mean(samples.iter().map(|s| s.displacement as f64))),
                samples.iter().map(|s| s.displacement).max().unwrap_or(0).to_string(),
                num(mean(samples.iter().map(|s| s.max_column_pi as f64))),
                b_fraction,
                num(samples.iter().filter(|s| s.tau_eq_full).count() as f64 / reps as f64),
            ];
            row.extend(cyl);
            row.push(num(samples.iter().filter(|s| s.canonical_exact).count() as f64 / reps as f64));
            run.table("geometry").row(row)?;
            let hist = run.table("geometry-hist");
            let mut displacement: BTreeMap<i64, usize> = BTreeMap::new();
            let mut column: BTreeMap<i64, usize> = BTreeMap::new();
            for s in &samples {
                *displacement.entry(s.displacement).or_default() += 1;
                *column.entry(s.max_column_pi as i64).or_default() += 1;
            }
            for (name, counts) in [("displacement", displacement), ("max_column_pi", column)] {
                for (value, count) in counts {
                    hist.row(vec![n.to_string(), k.to_string(), name.to_string(), value.to_string(), count.to_string()])?;
                }
            }
        }
    }
    Ok(())
}

struct ShapeScan<'a> {
    start: Vertex,
    targets: &'a [Vertex],
}

impl WeightVisitor for ShapeScan<'_> {
    type Output = Vec<f64>;

    fn visit<W: Time>(self, weights: &EdgeWeights<W>) -> Result<Vec<f64>> {
        self.targets
            .iter()
            .map(|&v| Ok(point_to_point_time(weights, self.start, v)?.value.as_f64()))
            .collect()
    }
}

fn shape(run: &mut Run) -> Result<()> {
    let config = run.config;
    let hs = config.grid.h_values();
    for n in config.grid.n_values() {
        // Targets sit `pad` rows inside a taller box so paths may wander.
        let pad = (n / 4).max(1);
        let dys: Vec<usize> = hs.iter().map(|h| (h * n as f64).round() as usize).collect();
        let height = dys.iter().max().copied().unwrap_or(0) + 2 * pad;
        let region = Region::new(n, height);
        let start = Vertex::new(0, pad as i64);
        let targets: Vec<Vertex> = dys.iter().map(|&dy| Vertex::new(n as i64, (pad + dy) as i64)).collect();
        let seed = run.seed(StreamRole::Evaluation, format!("n={n}"));
        let times: Vec<Vec<f64>> = (0..config.reps as u64)
            .into_par_iter()
            .map(|i| {
                let env = Environment::sample(config.spec, region, derive_seed(seed, &[i]))?;
                visit_weights(&env, ShapeScan { start, targets: &targets })
            })
            .collect::<Result<_>>()?;
        let nf = n as f64;
        let flat = hs.iter().position(|&h| h == 0.0);
        for (j, &h) in hs.iter().enumerate() {
            let mu: Vec<f64> = times.iter().map(|t| t[j] / nf).collect();
            let s = summarize(&mu)?;
            let curvature = match flat {
                Some(f) if dys[j] > 0 => {
                    let h_eff = dys[j] as f64 / nf;
                    let d: Vec<f64> = times.iter().map(|t| (t[j] - t[f]) / nf / (h_eff * h_eff)).collect();
                    let c = summarize(&d)?.mean;
                    vec![num(c.point), num(c.lo()), num(c.hi())]
                }
                _ => vec![String::new(); 3],
            };
            let mut row = vec![
                n.to_string(),
                num(h),
                dys[j].to_string(),
                config.reps.to_string(),
                num(s.mean.point),
                num(s.mean.lo()),
                num(s.mean.hi()),
            ];
            row.extend(curvature);
            run.table("shape").row(row)?;
        }
    }
    Ok(())
}

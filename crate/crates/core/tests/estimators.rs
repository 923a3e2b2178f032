use std::collections::BTreeSet;

use fpplab_core::oracle::{brute_force_over, enumerate_crossings, exact_distribution, DEFAULT_PATH_CAP};
use fpplab_core::rng::{derive_seed, CounterStream};
use fpplab_core::stats::{self, interval_mass, quantile, summarize, summarize_with, CiMethod, ThresholdFunction};
use fpplab_core::*;

fn two_point() -> DistributionSpec {
    DistributionSpec::two_point(1.0, 2.0, 0.5).unwrap()
}

/// Flip every edge of the problem's region and re-solve from scratch.
fn naive_flip_changes(f: &ThresholdFunction, env: &Environment) -> BTreeSet<Edge> {
    let base = f.evaluate(env).unwrap();
    env.region()
        .edges()
        .filter(|&e| f.evaluate(&env.flipped_at(e).unwrap()).unwrap() != base)
        .collect()
}

#[test]
fn accelerated_flips_match_naive_recomputation() {
    let n = 4;
    for seed in 0..50u64 {
        let env = Environment::sample(two_point(), Region::square(n), derive_seed(40, &[seed])).unwrap();
        for k in [1, 2, 4] {
            let problem = CrossingProblem::tau(n, k).unwrap();
            let v = solve::crossing_value(&env, &problem).unwrap();
            for q in [v - 1.0, v, v + 1.0] {
                let f = ThresholdFunction::new(problem, q);
                let fast: BTreeSet<Edge> = stats::flip_changes(&f, &env).unwrap().into_iter().collect();
                assert_eq!(fast, naive_flip_changes(&f, &env), "seed {seed} k {k} q {q}");
            }
        }
    }
}

#[test]
fn accelerated_flips_match_naive_with_rational_atoms() {
    let spec = DistributionSpec::two_point(0.5, 1.25, 0.6).unwrap();
    for seed in 0..20u64 {
        let env = Environment::sample(spec, Region::square(5), derive_seed(41, &[seed])).unwrap();
        let problem = CrossingProblem::tau(5, 2).unwrap();
        let v = solve::crossing_value(&env, &problem).unwrap();
        for q in [v - 0.75, v, v + 0.75] {
            let f = ThresholdFunction::new(problem, q);
            let fast: BTreeSet<Edge> = stats::flip_changes(&f, &env).unwrap().into_iter().collect();
            assert_eq!(fast, naive_flip_changes(&f, &env));
        }
    }
}

#[test]
fn upward_pivotal_edges_lie_in_pi() {
    for n in 2..=3usize {
        for k in 1..=n {
            let problem = CrossingProblem::tau(n, k).unwrap();
            let paths = enumerate_crossings(&problem, DEFAULT_PATH_CAP).unwrap();
            for seed in 0..40u64 {
                let env = Environment::sample(two_point(), Region::square(n), derive_seed(42, &[seed])).unwrap();
                let w = env.weights_as::<i64>().unwrap();
                let brute = brute_force_over(&w, &paths).unwrap();
                let pi = brute.all_geodesics.intersection();
                for e in env.region().edges().filter(|&e| env.weight_at(e) == Some(1.0)) {
                    let raised = env.flipped_at(e).unwrap().weights_as::<i64>().unwrap();
                    if brute_force_over(&raised, &paths).unwrap().value > brute.value {
                        assert!(pi.contains(&e), "n {n} k {k} seed {seed} edge {e}");
                    }
                }
            }
        }
    }
}

#[test]
fn unit_square_influence_estimates() {
    let f = ThresholdFunction::new(CrossingProblem::tau(1, 1).unwrap(), 2.0);
    let report = stats::influences(&f, &two_point(), 20_000, 43).unwrap();
    for (edge, est) in &report.edges {
        match edge.orientation {
            Orientation::Vertical => assert_eq!(est.point, 0.0),
            Orientation::Horizontal => assert!(est.contains(0.5), "{edge}: {est:?}"),
        }
    }
    assert!(report.sum_of_squares.contains(0.5), "{:?}", report.sum_of_squares);
    assert!(stats::influences(&f, &DistributionSpec::uniform(1.0, 2.0).unwrap(), 10, 1).is_err());
}

#[test]
fn influences_match_exact_law_on_a_small_square() {
    let problem = CrossingProblem::tau(2, 1).unwrap();
    let dist = exact_distribution(&two_point(), &problem).unwrap();
    let q = dist.quantile(0.5).unwrap();
    let f = ThresholdFunction::new(problem, *q.numer() as f64 / *q.denom() as f64);
    let report = stats::influences(&f, &two_point(), 20_000, 44).unwrap();
    let exact = dist.influences(q);
    assert_eq!(exact.len(), report.edges.len());
    for ((e1, exact), (e2, est)) in exact.iter().zip(&report.edges) {
        assert_eq!(e1, e2);
        let x = exact.numer().to_string().parse::<f64>().unwrap() / exact.denom().to_string().parse::<f64>().unwrap();
        // 4 standard errors, since there are many edges.
        let se = est.half_width / stats::z_value(est.level);
        assert!((est.point - x).abs() <= 4.0 * se + 1e-12, "{e1}: {} vs {x}", est.point);
    }
}

#[test]
fn noise_covariance_limits() {
    let problem = CrossingProblem::tau(3, 1).unwrap();
    let spec = two_point();
    let q = stats::calibrate_quantile(&spec, &problem, 0.5, 4000, 45).unwrap();
    let f = ThresholdFunction::new(problem, q);
    let values = stats::sample_values(&spec, &problem, 20_000, 46).unwrap();
    let p = values.iter().filter(|&&v| v >= q).count() as f64 / values.len() as f64;

    let zero = stats::noise_covariance(&f, &spec, 0.0, 20_000, 47).unwrap();
    // Var(f) = p(1-p), up to the error of p itself.
    assert!((zero.point - p * (1.0 - p)).abs() < zero.half_width + 0.01, "{zero:?} vs {}", p * (1.0 - p));
    let one = stats::noise_covariance(&f, &spec, 1.0, 20_000, 48).unwrap();
    assert!(one.contains(0.0), "{one:?}");
    assert!(stats::noise_covariance(&f, &spec, 1.5, 10, 1).is_err());
}

#[test]
fn noise_covariance_decreases_in_eps() {
    let problem = CrossingProblem::tau(4, 1).unwrap();
    let spec = two_point();
    let q = stats::calibrate_quantile(&spec, &problem, 0.5, 4000, 49).unwrap();
    let f = ThresholdFunction::new(problem, q);
    let grid = [0.0, 0.1, 0.3, 0.6, 1.0];
    let est: Vec<_> = grid.iter().map(|&e| stats::noise_covariance(&f, &spec, e, 20_000, 50).unwrap()).collect();
    for e in &est {
        // Nonnegative within 4 standard errors.
        let se = e.half_width / stats::z_value(e.level);
        assert!(e.point > -4.0 * se, "{e:?}");
    }
    for w in est.windows(2) {
        let se = ((w[0].half_width.powi(2) + w[1].half_width.powi(2)).sqrt()) / stats::z_value(w[0].level);
        assert!(w[1].point <= w[0].point + 4.0 * se, "{:?} then {:?}", w[0], w[1]);
    }
}

#[test]
fn noise_covariance_matches_unit_square_closed_form() {
    let spec = two_point();
    let f = ThresholdFunction::new(CrossingProblem::tau(1, 1).unwrap(), 2.0);
    for eps in [0.2, 0.5, 0.8] {
        let exact = 0.25 * (1.0 - eps / 2.0) * (1.0 - eps / 2.0) - 1.0 / 16.0;
        let est = stats::noise_covariance(&f, &spec, eps, 40_000, 51).unwrap();
        assert!(est.contains(exact), "eps {eps}: {est:?} vs {exact}");
    }
}

#[test]
fn mean_interval_covers_at_nominal_rate() {
    let trials = 1000;
    let mut covered = 0;
    for t in 0..trials {
        let mut s = CounterStream::new(derive_seed(52, &[t]), 9, 0);
        let xs: Vec<f64> = (0..100).map(|_| s.next_gaussian()).collect();
        covered += summarize(&xs).unwrap().mean.contains(0.0) as usize;
    }
    let sd = (trials as f64 * 0.99 * 0.01).sqrt();
    assert!((covered as f64 - 0.99 * trials as f64).abs() <= 4.0 * sd, "{covered}/{trials}");
}

#[test]
fn variance_intervals_cover_at_nominal_rate() {
    let trials = 400;
    let mut normal = 0;
    let mut boot = 0;
    for t in 0..trials {
        let mut s = CounterStream::new(derive_seed(53, &[t]), 9, 0);
        let xs: Vec<f64> = (0..400).map(|_| s.next_gaussian()).collect();
        normal += summarize(&xs).unwrap().variance.contains(1.0) as usize;
        boot += summarize_with(&xs, 0.99, CiMethod::Bootstrap, t).unwrap().variance.contains(1.0) as usize;
    }
    let sd = (trials as f64 * 0.99 * 0.01).sqrt();
    for (name, c) in [("normal", normal), ("bootstrap", boot)] {
        assert!((c as f64 - 0.99 * trials as f64).abs() <= 4.0 * sd, "{name}: {c}/{trials}");
    }
}

#[test]
fn summary_and_mass_examples() {
    let s = summarize(&[0.0, 2.0]).unwrap();
    assert_eq!((s.mean.point, s.variance.point), (1.0, 2.0));
    assert_eq!(summarize(&[3.0; 10]).unwrap().variance.point, 0.0);
    assert!(summarize(&[1.0]).is_err());

    assert!((interval_mass(&[2.0, 2.0, 3.5], 2.0, 1.0).unwrap().point - 2.0 / 3.0).abs() < 1e-15);
    assert_eq!(interval_mass(&[2.0, 2.0, 3.5], 10.0, 1.0).unwrap().point, 0.0);
    assert_eq!(interval_mass(&[2.0, 2.0, 3.5], 0.0, 10.0).unwrap().point, 1.0);
    assert!(interval_mass(&[1.0], 0.0, 0.0).is_err());

    assert_eq!(quantile(&[1.0, 2.0, 3.0], 0.5).unwrap(), 2.0);
    assert_eq!(quantile(&[4.0; 7], 0.99).unwrap(), 4.0);
    assert_eq!(quantile(&[1.0, 2.0, 3.0, 4.0], 0.0).unwrap(), 1.0);
    assert!(quantile(&[], 0.5).is_err());
}

#[test]
fn estimators_do_not_depend_on_thread_count() {
    let spec = two_point();
    let problem = CrossingProblem::tau(8, 2).unwrap();
    let f = ThresholdFunction::new(problem, 10.0);
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            (
                stats::sample_values(&spec, &problem, 300, 54).unwrap(),
                stats::noise_covariance(&f, &spec, 0.2, 300, 55).unwrap(),
                stats::influences(&f, &spec, 100, 56).unwrap(),
            )
        })
    };
    assert_eq!(run(1), run(3));
}

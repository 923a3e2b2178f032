use fpplab_core::rng::derive_seed;
use fpplab_core::*;
use statrs::distribution::{ContinuousCDF, Uniform};

fn within_sigmas(hits: usize, trials: usize, p: f64, sigmas: f64) -> bool {
    let sd = (trials as f64 * p * (1.0 - p)).sqrt();
    (hits as f64 - trials as f64 * p).abs() <= sigmas * sd
}

#[test]
fn a_fraction_is_binomial() {
    let spec = DistributionSpec::two_point(1.0, 2.0, 0.5).unwrap();
    let region = Region::square(8);
    let mut a = 0;
    let mut total = 0;
    for seed in 0..10_000u64 {
        let env = Environment::sample(spec, region, derive_seed(20, &[seed])).unwrap();
        a += env.weights().iter().filter(|&&w| w == 1.0).count();
        total += region.num_edges();
    }
    assert!(within_sigmas(a, total, 0.5, 4.0), "{a}/{total}");
}

#[test]
fn per_edge_mass_is_p_across_seeds() {
    // One fixed edge over many seeds, for an asymmetric p.
    let spec = DistributionSpec::two_point(1.0, 3.0, 0.3).unwrap();
    let region = Region::square(4);
    let id = region.edge_id(Edge::vertical(2, 1)).unwrap();
    let hits = (0..20_000u64)
        .filter(|&s| Environment::sample(spec, region, derive_seed(21, &[s])).unwrap().weight(id) == 1.0)
        .count();
    assert!(within_sigmas(hits, 20_000, 0.3, 4.0), "{hits}");
}

#[test]
fn resampling_changes_the_expected_fraction() {
    let (eps, p) = (0.1, 0.5);
    let spec = DistributionSpec::two_point(1.0, 2.0, p).unwrap();
    let region = Region::square(71);
    let env = Environment::sample(spec, region, 22).unwrap();
    let noisy = env.resampled(eps, 23).unwrap();
    let changed = env.weights().iter().zip(noisy.weights()).filter(|(a, b)| a != b).count();
    let edges = region.num_edges();
    assert!(edges >= 10_000);
    assert!(within_sigmas(changed, edges, eps * 2.0 * p * (1.0 - p), 4.0), "{changed}/{edges}");
}

#[test]
fn full_resampling_decorrelates() {
    let spec = DistributionSpec::two_point(1.0, 2.0, 0.5).unwrap();
    let region = Region::square(40);
    let env = Environment::sample(spec, region, 24).unwrap();
    let noisy = env.resampled(1.0, 25).unwrap();
    let x: Vec<f64> = env.weights().iter().map(|&w| (w == 1.0) as u8 as f64).collect();
    let y: Vec<f64> = noisy.weights().iter().map(|&w| (w == 1.0) as u8 as f64).collect();
    let m = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / m, y.iter().sum::<f64>() / m);
    let cov = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>() / (m - 1.0);
    let corr = cov / (mx * (1.0 - mx) * my * (1.0 - my)).sqrt();
    // Under independence the sample correlation has sd about 1/sqrt(m).
    assert!(corr.abs() < 4.0 / m.sqrt(), "corr {corr}");
}

#[test]
fn resampling_preserves_two_point_marginals() {
    let spec = DistributionSpec::two_point(1.0, 2.0, 0.3).unwrap();
    let region = Region::square(4);
    for eps in [0.0, 0.25, 0.5, 1.0] {
        let mut a = 0;
        let mut total = 0;
        for s in 0..2_500u64 {
            let env = Environment::sample(spec, region, derive_seed(26, &[s])).unwrap();
            let noisy = env.resampled(eps, derive_seed(27, &[s])).unwrap();
            a += noisy.weights().iter().filter(|&&w| w == 1.0).count();
            total += region.num_edges();
        }
        assert!(total >= 100_000);
        assert!(within_sigmas(a, total, 0.3, 4.0), "eps {eps}: {a}/{total}");
    }
}

#[test]
fn resampling_preserves_continuous_marginals() {
    // Chi-square over 20 equiprobable bins of Uniform[1, 3].
    let spec = DistributionSpec::uniform(1.0, 3.0).unwrap();
    let law = Uniform::new(1.0, 3.0).unwrap();
    let region = Region::square(10);
    let bins = 20;
    for eps in [0.1, 0.5, 1.0] {
        let mut counts = vec![0usize; bins];
        let mut total = 0;
        for s in 0..500u64 {
            let env = Environment::sample(spec, region, derive_seed(28, &[s])).unwrap();
            for &w in env.resampled(eps, derive_seed(29, &[s])).unwrap().weights() {
                let b = ((law.cdf(w) * bins as f64) as usize).min(bins - 1);
                counts[b] += 1;
                total += 1;
            }
        }
        assert!(total >= 100_000);
        let expected = total as f64 / bins as f64;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        let df = (bins - 1) as f64;
        assert!(chi2 < df + 4.0 * (2.0 * df).sqrt(), "eps {eps}: chi2 {chi2}");
    }
}

#[test]
fn exponential_mean_matches_rate() {
    let spec = DistributionSpec::exponential(2.0).unwrap();
    let region = Region::square(30);
    let mut sum = 0.0;
    let mut total = 0;
    for s in 0..60u64 {
        let env = Environment::sample(spec, region, derive_seed(30, &[s])).unwrap();
        sum += env.weights().iter().sum::<f64>();
        total += region.num_edges();
    }
    let mean = sum / total as f64;
    // sd of the mean is 0.5 / sqrt(total)
    assert!((mean - 0.5).abs() < 4.0 * 0.5 / (total as f64).sqrt(), "{mean}");
    assert!((spec.mean() - 0.5).abs() < 1e-12);
}

#[test]
fn flips_touch_one_edge() {
    let spec = DistributionSpec::two_point(1.0, 2.0, 0.5).unwrap();
    let env = Environment::sample(spec, Region::square(4), 31).unwrap();
    for e in Region::square(4).edges() {
        let flipped = flipped_environment(&env, e).unwrap();
        for f in Region::square(4).edges() {
            let (a, b) = (env.weight_at(f).unwrap(), flipped.weight_at(f).unwrap());
            if f == e {
                assert_eq!(a + b, 3.0);
            } else {
                assert_eq!(a, b);
            }
        }
        assert_eq!(flipped_environment(&flipped, e).unwrap(), env);
    }
}

//! Edge-weight laws, seeded environments, and the three environment
//! operators: monotone Gaussian shift, ε-resampling and single-edge flip.
//!
//! Every environment carries a standard Gaussian value per edge and derives
//! its weight through a fixed coupling: the threshold rule
//! `t = a if N <= s else b` for two-point laws, and the quantile transform
//! `t = F⁻¹(Φ(N))` for continuous laws. Shifts act on the Gaussian values,
//! which makes passage times monotone in the shift for every realization.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Edge, EdgeId, EdgeWeights, Region};
use crate::rng::{self, streams, CounterStream};
use crate::scalar::Time;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DistributionSpec {
    /// Mass `p` at `a`, `1 - p` at `b`.
    TwoPoint { a: f64, b: f64, p: f64 },
    /// Uniform on `[a, b]`.
    Uniform { a: f64, b: f64 },
    Exponential { rate: f64 },
}

impl DistributionSpec {
    pub fn two_point(a: f64, b: f64, p: f64) -> Result<Self> {
        let spec = Self::TwoPoint { a, b, p };
        spec.validate()?;
        Ok(spec)
    }

    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        let spec = Self::Uniform { a, b };
        spec.validate()?;
        Ok(spec)
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        let spec = Self::Exponential { rate };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::TwoPoint { a, b, p } => {
                if !(a > 0.0 && a < b && b.is_finite()) {
                    return Err(Error::config(format!(
                        "two-point weights need 0 < a < b < inf, got a={a}, b={b}"
                    )));
                }
                if !(p > 0.0 && p <= 1.0) {
                    return Err(Error::config(format!("two-point mass p={p} outside (0, 1]")));
                }
            }
            Self::Uniform { a, b } => {
                if !(a > 0.0 && a < b && b.is_finite()) {
                    return Err(Error::config(format!(
                        "uniform weights need 0 < a < b < inf, got a={a}, b={b}"
                    )));
                }
            }
            Self::Exponential { rate } => {
                if !(rate > 0.0 && rate.is_finite()) {
                    return Err(Error::config(format!("exponential rate {rate} must be positive")));
                }
            }
        }
        Ok(())
    }

    pub fn is_two_point(&self) -> bool {
        matches!(self, Self::TwoPoint { .. })
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::TwoPoint { .. } => "two-point",
            Self::Uniform { .. } => "uniform",
            Self::Exponential { .. } => "exponential",
        }
    }

    /// `(a, b)` for two-point laws.
    pub fn atoms(&self) -> Option<(f64, f64)> {
        match *self {
            Self::TwoPoint { a, b, .. } => Some((a, b)),
            _ => None,
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Self::TwoPoint { a, b, p } => p * a + (1.0 - p) * b,
            Self::Uniform { a, b } => 0.5 * (a + b),
            Self::Exponential { rate } => 1.0 / rate,
        }
    }

    /// The `s` with `Φ(s) = p` used by the two-point threshold rule.
    pub fn gaussian_threshold(&self) -> Option<f64> {
        match *self {
            Self::TwoPoint { p, .. } => Some(rng::standard_normal_quantile(p)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Coupling {
    spec: DistributionSpec,
    threshold: f64,
}

impl Coupling {
    fn weight(&self, g: f64) -> f64 {
        match self.spec {
            DistributionSpec::TwoPoint { a, b, .. } => {
                if g <= self.threshold {
                    a
                } else {
                    b
                }
            }
            DistributionSpec::Uniform { a, b } => a + (b - a) * rng::standard_normal_cdf(g),
            DistributionSpec::Exponential { rate } => {
                // -ln(1 - Φ(g)) through the survival function keeps the upper tail.
                let t = -rng::standard_normal_sf(g).ln() / rate;
                t.max(f64::MIN_POSITIVE)
            }
        }
    }
}

/// Additive shifts of the Gaussian field, keyed by edge.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ShiftField {
    entries: BTreeMap<Edge, f64>,
}

impl ShiftField {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (Edge, f64)>) -> Result<Self> {
        let mut field = Self::new();
        for (e, v) in entries {
            field.insert(e, v)?;
        }
        Ok(field)
    }

    pub fn insert(&mut self, e: Edge, value: f64) -> Result<()> {
        if !value.is_finite() {
            return Err(Error::invalid(format!("shift {value} on edge {e} is not finite")));
        }
        self.entries.insert(e, value);
        Ok(())
    }

    pub fn get(&self, e: &Edge) -> f64 {
        self.entries.get(e).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Edge, &f64)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entrywise sum over the union of supports.
    pub fn plus(&self, other: &ShiftField) -> ShiftField {
        let mut entries = self.entries.clone();
        for (e, v) in &other.entries {
            *entries.entry(*e).or_insert(0.0) += v;
        }
        ShiftField { entries }
    }

    pub fn scaled(&self, factor: f64) -> ShiftField {
        ShiftField { entries: self.entries.iter().map(|(e, v)| (*e, v * factor)).collect() }
    }
}

/// The uniform shift `r / sqrt(k n)` on every edge of `[0,n] x [0,2k]`.
pub fn cylinder_shift_field(r: f64, n: usize, k: usize) -> Result<ShiftField> {
    if n == 0 || k == 0 {
        return Err(Error::invalid(format!("shift field needs n, k >= 1 (n={n}, k={k})")));
    }
    if k > n {
        return Err(Error::invalid(format!("shift field needs k <= n (n={n}, k={k})")));
    }
    if !(r.abs() <= 2.0) {
        return Err(Error::invalid(format!("shift amplitude r={r} outside [-2, 2]")));
    }
    let amount = r / ((k * n) as f64).sqrt();
    let rect = Region::new(n, 2 * k);
    Ok(ShiftField { entries: rect.edges().map(|e| (e, amount)).collect() })
}

/// A seeded edge-weight environment on a rectangle.
///
/// Immutable: every operator returns a new environment.
#[derive(Debug, Clone, PartialEq)]
pub struct Environment {
    spec: DistributionSpec,
    region: Region,
    seed: u64,
    // Unused (zero) for continuous laws.
    threshold: f64,
    base_field: Vec<f64>,
    shift: Vec<f64>,
    // Two-point only. A flipped edge carries the opposite atom of the one
    // its Gaussian value selects.
    flipped: Vec<bool>,
    weights: Vec<f64>,
}

impl Environment {
    pub fn sample(spec: DistributionSpec, region: Region, seed: u64) -> Result<Self> {
        spec.validate()?;
        if region.num_edges() == 0 {
            return Err(Error::invalid("environment region has no edges"));
        }
        let mut stream = CounterStream::new(seed, streams::BASE_FIELD, 0);
        let base_field: Vec<f64> = (0..region.num_edges()).map(|_| stream.next_gaussian()).collect();
        let m = base_field.len();
        let mut env = Self {
            spec,
            region,
            seed,
            threshold: spec.gaussian_threshold().unwrap_or(0.0),
            base_field,
            shift: vec![0.0; m],
            flipped: vec![false; m],
            weights: vec![0.0; m],
        };
        env.refresh_all();
        Ok(env)
    }

    /// Builds a two-point environment from explicit atoms; Gaussian values
    /// are placed at the conditional medians of the matching half-line.
    pub fn from_two_point_pattern(
        spec: DistributionSpec,
        region: Region,
        mut is_b: impl FnMut(Edge) -> bool,
    ) -> Result<Self> {
        let DistributionSpec::TwoPoint { p, .. } = spec else {
            return Err(Error::Unsupported { operation: "explicit atom patterns", kind: spec.kind_name() });
        };
        spec.validate()?;
        if p >= 1.0 {
            return Err(Error::invalid("a pattern with b-edges needs p < 1"));
        }
        let low = rng::standard_normal_quantile(0.5 * p);
        let high = rng::standard_normal_quantile(p + 0.5 * (1.0 - p));
        let base_field: Vec<f64> = region.edges().map(|e| if is_b(e) { high } else { low }).collect();
        let m = base_field.len();
        let mut env = Self {
            spec,
            region,
            seed: 0,
            threshold: spec.gaussian_threshold().unwrap_or(0.0),
            base_field,
            shift: vec![0.0; m],
            flipped: vec![false; m],
            weights: vec![0.0; m],
        };
        env.refresh_all();
        Ok(env)
    }

    fn refresh_all(&mut self) {
        for id in 0..self.weights.len() {
            self.refresh(id);
        }
    }

    fn refresh(&mut self, id: EdgeId) {
        let coupling = Coupling { spec: self.spec, threshold: self.threshold };
        let mut w = coupling.weight(self.base_field[id] + self.shift[id]);
        if self.flipped[id] {
            if let Some((a, b)) = self.spec.atoms() {
                w = if w == a { b } else { a };
            }
        }
        self.weights[id] = w;
    }

    pub fn spec(&self) -> &DistributionSpec {
        &self.spec
    }

    pub fn region(&self) -> Region {
        self.region
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn weight(&self, id: EdgeId) -> f64 {
        self.weights[id]
    }

    pub fn weight_at(&self, e: Edge) -> Option<f64> {
        self.region.edge_id(e).map(|id| self.weights[id])
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// The sampled standard Gaussian values, before any shift.
    pub fn base_field(&self) -> &[f64] {
        &self.base_field
    }

    /// Gaussian value after shifts; the weight of an unflipped edge is the
    /// coupling applied to this value.
    pub fn gaussian_value(&self, id: EdgeId) -> f64 {
        self.base_field[id] + self.shift[id]
    }

    pub fn is_flipped(&self, id: EdgeId) -> bool {
        self.flipped[id]
    }

    pub fn is_b(&self, id: EdgeId) -> bool {
        matches!(self.spec.atoms(), Some((_, b)) if self.weights[id] == b)
    }

    pub fn gaussian_threshold(&self) -> Option<f64> {
        self.spec.is_two_point().then_some(self.threshold)
    }

    /// Converts weights to the solver scalar `W`, failing when a weight has
    /// no exact representation there.
    pub fn weights_as<W: Time>(&self) -> Result<EdgeWeights<W>> {
        let values = if let Some((a, b)) = self.spec.atoms() {
            let wa = W::from_weight(a).ok_or(Error::InexactWeight(a))?;
            let wb = W::from_weight(b).ok_or(Error::InexactWeight(b))?;
            self.weights.iter().map(|&w| if w == a { wa } else { wb }).collect()
        } else {
            self.weights
                .iter()
                .map(|&w| W::from_weight(w).ok_or(Error::InexactWeight(w)))
                .collect::<Result<Vec<W>>>()?
        };
        Ok(EdgeWeights::new(self.region, values))
    }

    pub fn shifted(&self, field: &ShiftField) -> Result<Self> {
        let mut out = self.clone();
        for (e, v) in field.iter() {
            let id = self.region.edge_id(*e).ok_or_else(|| {
                Error::invalid(format!("shift on edge {e} outside the {}x{} region", self.region.width, self.region.height))
            })?;
            out.shift[id] += v;
            out.refresh(id);
        }
        Ok(out)
    }

    /// Each edge independently keeps its value with probability `1 - eps` and
    /// otherwise receives a fresh Gaussian value (shift and flip cleared).
    pub fn resampled(&self, eps: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eps) {
            return Err(Error::invalid(format!("resampling probability {eps} outside [0, 1]")));
        }
        let mut out = self.clone();
        let mut coins = CounterStream::new(seed, streams::RESAMPLE_COIN, 0);
        let mut fresh = CounterStream::new(seed, streams::RESAMPLE_FIELD, 0);
        for id in 0..self.weights.len() {
            let coin = coins.next_open01();
            let g = fresh.next_gaussian();
            if coin < eps {
                out.base_field[id] = g;
                out.shift[id] = 0.0;
                out.flipped[id] = false;
                out.refresh(id);
            }
        }
        Ok(out)
    }

    /// Swaps the atom carried by edge `e` (`a <-> b`).
    pub fn flipped_at(&self, e: Edge) -> Result<Self> {
        if !self.spec.is_two_point() {
            return Err(Error::Unsupported { operation: "edge flips", kind: self.spec.kind_name() });
        }
        let id = self
            .region
            .edge_id(e)
            .ok_or_else(|| Error::invalid(format!("edge {e} outside the environment")))?;
        let mut out = self.clone();
        out.flipped[id] = !out.flipped[id];
        out.refresh(id);
        Ok(out)
    }
}

/// Free-function form of [`Environment::sample`].
pub fn sample_environment(spec: DistributionSpec, region: Region, seed: u64) -> Result<Environment> {
    Environment::sample(spec, region, seed)
}

pub fn shifted_environment(env: &Environment, field: &ShiftField) -> Result<Environment> {
    env.shifted(field)
}

pub fn resampled_environment(env: &Environment, eps: f64, seed: u64) -> Result<Environment> {
    env.resampled(eps, seed)
}

pub fn flipped_environment(env: &Environment, e: Edge) -> Result<Environment> {
    env.flipped_at(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn half() -> DistributionSpec {
        DistributionSpec::two_point(1.0, 2.0, 0.5).unwrap()
    }

    #[test]
    fn invalid_specs_are_config_errors() {
        assert!(DistributionSpec::two_point(2.0, 1.0, 0.5).unwrap_err().is_config());
        assert!(DistributionSpec::two_point(1.0, 1.0, 0.5).unwrap_err().is_config());
        assert!(DistributionSpec::two_point(1.0, 2.0, 0.0).unwrap_err().is_config());
        assert!(DistributionSpec::two_point(1.0, 2.0, 1.5).unwrap_err().is_config());
        assert!(DistributionSpec::uniform(0.0, 1.0).unwrap_err().is_config());
        assert!(DistributionSpec::exponential(-1.0).unwrap_err().is_config());
    }

    #[test]
    fn threshold_matches_mass() {
        for p in [0.1, 0.3, 0.5, 0.8, 0.999] {
            let s = DistributionSpec::two_point(1.0, 2.0, p).unwrap().gaussian_threshold().unwrap();
            assert!((rng::standard_normal_cdf(s) - p).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_mass_gives_all_a() {
        let spec = DistributionSpec::two_point(1.0, 2.0, 1.0).unwrap();
        let env = Environment::sample(spec, Region::square(6), 42).unwrap();
        assert!(env.weights().iter().all(|&w| w == 1.0));
    }

    #[test]
    fn sampling_is_deterministic() {
        for spec in [half(), DistributionSpec::uniform(1.0, 3.0).unwrap(), DistributionSpec::exponential(2.0).unwrap()] {
            let e1 = Environment::sample(spec, Region::new(5, 4), 9).unwrap();
            let e2 = Environment::sample(spec, Region::new(5, 4), 9).unwrap();
            assert_eq!(e1, e2);
            let bits1: Vec<u64> = e1.weights().iter().map(|w| w.to_bits()).collect();
            let bits2: Vec<u64> = e2.weights().iter().map(|w| w.to_bits()).collect();
            assert_eq!(bits1, bits2);
            assert_ne!(e1, Environment::sample(spec, Region::new(5, 4), 10).unwrap());
        }
    }

    #[test]
    fn empty_region_is_rejected() {
        assert!(Environment::sample(half(), Region::new(0, 0), 1).is_err());
    }

    #[test]
    fn threshold_rule_holds_per_edge() {
        let env = Environment::sample(DistributionSpec::two_point(1.0, 3.0, 0.3).unwrap(), Region::square(8), 5).unwrap();
        let s = env.gaussian_threshold().unwrap();
        for id in 0..env.region().num_edges() {
            let expected = if env.gaussian_value(id) <= s { 1.0 } else { 3.0 };
            assert_eq!(env.weight(id), expected);
        }
    }

    #[test]
    fn continuous_weights_are_positive_and_in_support() {
        let env = Environment::sample(DistributionSpec::uniform(0.5, 1.5).unwrap(), Region::square(10), 3).unwrap();
        assert!(env.weights().iter().all(|&w| (0.5..=1.5).contains(&w)));
        let env = Environment::sample(DistributionSpec::exponential(1.0).unwrap(), Region::square(10), 3).unwrap();
        assert!(env.weights().iter().all(|&w| w > 0.0 && w.is_finite()));
    }

    #[test]
    fn zero_shift_is_identity() {
        let env = Environment::sample(half(), Region::square(4), 1).unwrap();
        let zero = cylinder_shift_field(0.0, 4, 2).unwrap();
        assert!(zero.iter().all(|(_, v)| *v == 0.0));
        assert_eq!(env.shifted(&zero).unwrap().weights(), env.weights());
    }

    #[test]
    fn shift_crosses_threshold() {
        let spec = half();
        let env = Environment::from_two_point_pattern(spec, Region::new(1, 0), |_| false).unwrap();
        // Move the lone edge to s - 0.1, then push it by +0.2.
        let s = env.gaussian_threshold().unwrap();
        let e = Edge::horizontal(0, 0);
        let to_below = ShiftField::from_entries([(e, (s - 0.1) - env.gaussian_value(0))]).unwrap();
        let below = env.shifted(&to_below).unwrap();
        assert!((below.gaussian_value(0) - (s - 0.1)).abs() < 1e-12);
        assert_eq!(below.weight(0), 1.0);
        let above = below.shifted(&ShiftField::from_entries([(e, 0.2)]).unwrap()).unwrap();
        assert_eq!(above.weight(0), 2.0);
    }

    #[test]
    fn shift_outside_region_fails() {
        let env = Environment::sample(half(), Region::square(2), 1).unwrap();
        let field = ShiftField::from_entries([(Edge::horizontal(5, 0), 1.0)]).unwrap();
        assert!(env.shifted(&field).is_err());
    }

    #[test]
    fn cylinder_field_values() {
        let f = cylinder_shift_field(1.0, 1, 1).unwrap();
        assert_eq!(f.len(), Region::new(1, 2).num_edges());
        assert!(f.iter().all(|(_, v)| *v == 1.0));
        let f = cylinder_shift_field(1.0, 4, 1).unwrap();
        assert!(f.iter().all(|(_, v)| *v == 0.5));
        assert!(f.iter().all(|(e, _)| Region::new(4, 2).contains_edge(*e)));
        assert!(cylinder_shift_field(1.0, 2, 3).is_err());
        assert!(cylinder_shift_field(2.5, 4, 1).is_err());
    }

    #[test]
    fn flips_are_local_involutions() {
        let env = Environment::sample(half(), Region::square(4), 11).unwrap();
        for id in 0..env.region().num_edges() {
            let e = env.region().edge(id);
            let once = env.flipped_at(e).unwrap();
            assert_ne!(once.weight(id), env.weight(id));
            for other in 0..env.region().num_edges() {
                if other != id {
                    assert_eq!(once.weight(other), env.weight(other));
                }
            }
            assert_eq!(once.flipped_at(e).unwrap(), env);
        }
        let a_edge = (0..env.region().num_edges()).find(|&i| env.weight(i) == 1.0).unwrap();
        assert_eq!(env.flipped_at(env.region().edge(a_edge)).unwrap().weight(a_edge), 2.0);
    }

    #[test]
    fn flip_requires_two_point() {
        let env = Environment::sample(DistributionSpec::uniform(1.0, 2.0).unwrap(), Region::square(2), 1).unwrap();
        assert!(matches!(env.flipped_at(Edge::horizontal(0, 0)), Err(Error::Unsupported { .. })));
    }

    #[test]
    fn resampling_extremes() {
        let env = Environment::sample(half(), Region::square(6), 2).unwrap();
        assert_eq!(env.resampled(0.0, 99).unwrap(), env);
        let full = env.resampled(1.0, 99).unwrap();
        assert!(full.base_field().iter().zip(env.base_field()).all(|(x, y)| x != y));
        assert!(env.resampled(1.5, 1).is_err());
    }

    #[test]
    fn weights_convert_exactly() {
        let env = Environment::sample(half(), Region::square(3), 4).unwrap();
        let w = env.weights_as::<i64>().unwrap();
        assert!(w.values().iter().all(|&x| x == 1 || x == 2));
        let odd = Environment::sample(DistributionSpec::two_point(0.5, 1.25, 0.5).unwrap(), Region::square(3), 4).unwrap();
        assert!(odd.weights_as::<i64>().is_err());
        assert!(odd.weights_as::<num_rational::Ratio<i64>>().is_ok());
    }

    fn arb_field(region: Region) -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-1.5f64..1.5, region.num_edges())
    }

    fn field_from(region: Region, values: &[f64]) -> ShiftField {
        ShiftField::from_entries(region.edges().zip(values.iter().copied())).unwrap()
    }

    proptest! {
        #[test]
        fn shift_is_monotone(seed in 0u64..1000, lo in arb_field(Region::square(4)), bump in arb_field(Region::square(4))) {
            let region = Region::square(4);
            for spec in [half(), DistributionSpec::uniform(1.0, 2.0).unwrap(), DistributionSpec::exponential(1.0).unwrap()] {
                let env = Environment::sample(spec, region, seed).unwrap();
                let hi: Vec<f64> = lo.iter().zip(&bump).map(|(x, d)| x + d.abs()).collect();
                let w1 = env.shifted(&field_from(region, &lo)).unwrap();
                let w2 = env.shifted(&field_from(region, &hi)).unwrap();
                for id in 0..region.num_edges() {
                    prop_assert!(w1.weight(id) <= w2.weight(id));
                }
            }
        }

        #[test]
        fn shifts_compose_exactly(seed in 0u64..1000, f1 in arb_field(Region::square(3)), f2 in arb_field(Region::square(3))) {
            let region = Region::square(3);
            for spec in [half(), DistributionSpec::exponential(0.7).unwrap()] {
                let env = Environment::sample(spec, region, seed).unwrap();
                let (a, b) = (field_from(region, &f1), field_from(region, &f2));
                let twice = env.shifted(&a).unwrap().shifted(&b).unwrap();
                let once = env.shifted(&a.plus(&b)).unwrap();
                let bits = |e: &Environment| e.weights().iter().map(|w| w.to_bits()).collect::<Vec<_>>();
                prop_assert_eq!(bits(&twice), bits(&once));
            }
        }
    }
}

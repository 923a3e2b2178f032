//! Picks the solver scalar for an environment and runs generic code on it.

use num_rational::Ratio;

use crate::environment::{DistributionSpec, Environment};
use crate::error::Result;
use crate::geodesic::{CrossingProblem, CrossingSolver};
use crate::lattice::EdgeWeights;
use crate::scalar::Time;

/// Largest atom denominator solved in rational arithmetic; beyond this,
/// sums over long paths could overflow `i64` and floats are used instead.
const MAX_EXACT_DENOMINATOR: i64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarKind {
    Integer,
    Rational,
    Float,
}

impl ScalarKind {
    pub fn for_spec(spec: &DistributionSpec) -> Self {
        let Some((a, b)) = spec.atoms() else {
            return Self::Float;
        };
        if i64::from_weight(a).is_some() && i64::from_weight(b).is_some() {
            return Self::Integer;
        }
        let small = |x: f64| {
            <Ratio<i64> as Time>::from_weight(x).is_some_and(|r| *r.denom() <= MAX_EXACT_DENOMINATOR)
        };
        if small(a) && small(b) {
            Self::Rational
        } else {
            Self::Float
        }
    }

    pub fn is_exact(self) -> bool {
        self != Self::Float
    }
}

/// Generic computation over an environment's weights.
pub trait WeightVisitor {
    type Output;
    fn visit<W: Time>(self, weights: &EdgeWeights<W>) -> Result<Self::Output>;
}

pub fn visit_weights<V: WeightVisitor>(env: &Environment, visitor: V) -> Result<V::Output> {
    match ScalarKind::for_spec(env.spec()) {
        ScalarKind::Integer => visitor.visit(&env.weights_as::<i64>()?),
        ScalarKind::Rational => visitor.visit(&env.weights_as::<Ratio<i64>>()?),
        ScalarKind::Float => visitor.visit(&env.weights_as::<f64>()?),
    }
}

struct Value<'a>(&'a CrossingProblem);

impl WeightVisitor for Value<'_> {
    type Output = f64;

    fn visit<W: Time>(self, weights: &EdgeWeights<W>) -> Result<f64> {
        Ok(CrossingSolver::new(weights, *self.0)?.value().as_f64())
    }
}

/// Crossing value computed exactly where the law allows, reported as `f64`.
pub fn crossing_value(env: &Environment, problem: &CrossingProblem) -> Result<f64> {
    visit_weights(env, Value(problem))
}

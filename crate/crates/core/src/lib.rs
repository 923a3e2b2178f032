//! Restricted first-passage percolation on `Z^2`: environments, exact
//! geodesic functionals, small-instance oracles, estimators and an
//! experiment harness.

pub mod environment;
pub mod error;
pub mod geodesic;
pub mod harness;
pub mod lattice;
pub mod oracle;
pub mod rng;
pub mod scalar;
pub mod solve;
pub mod stats;

pub use environment::{
    cylinder_shift_field, flipped_environment, resampled_environment, sample_environment, shifted_environment,
    DistributionSpec, Environment, ShiftField,
};
pub use error::{Error, Result};
pub use geodesic::{
    canonical_geodesic, column_intersections, crossing_potentials, crossing_with_forbidden, geodesic_intersection,
    path_geometry, point_to_point_time, restricted_crossing_time, strip_crossing, CanonicalGeodesic, CrossingPath,
    CrossingProblem, CrossingSolver, PathGeometry, PathResult, Topology, DEFAULT_CANONICAL_CAP,
};
pub use harness::{describe, run, ExperimentConfig, ExperimentKind, Manifest, Report};
pub use lattice::{Edge, EdgeId, EdgeWeights, Orientation, Region, Vertex};
pub use scalar::Time;

/// Exact rational passage times.
pub type Rational = num_rational::Ratio<i64>;
pub type ExactWeights = EdgeWeights<Rational>;
pub type ExactPathResult = PathResult<Rational>;
pub type FloatWeights = EdgeWeights<f64>;
pub type FloatPathResult = PathResult<f64>;

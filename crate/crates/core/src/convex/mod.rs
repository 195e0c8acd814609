//! Convex sets: membership oracles, hull membership, projection, volume
//! estimators, and numerical checks of the structural inequalities.

pub mod estimate;
pub mod hull;
pub mod lemmas;
pub mod project;
pub mod target;

pub use hull::{conv_membership, solve_hull, HullQuery, HullSolution, LP_TOL};
pub use target::{CustomOracle, PointHull, Polytope, Stripe, TargetSet, TargetSpec};
pub use estimate::{
    check_ball_theorem, estimate_distance, estimate_thickened_boundary_volume, BallTheoremCheck,
    BoundaryVolumeEstimate, Estimate,
};

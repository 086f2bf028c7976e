//! Quantum-advantage thresholds, maximally-entangled link placement and
//! large-network asymptotics.

mod asymptotic;
mod placement;
mod threshold;

pub use asymptotic::{
    asymptotic_profile, AsymptoticProfile, AsymptoticSample, FitScale, FittedOrder, OrderClass,
};
pub use placement::{
    expected_me_threshold, expected_random_placement, me_placement, me_threshold, me_threshold_for,
    ExpectedPlacement, MePlacement, PathSet, PlacementStrategy, MAX_EXHAUSTIVE_EDGES,
};
pub use threshold::{advantage_threshold, ThresholdResult, CLASSICAL_LIMIT};

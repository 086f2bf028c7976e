//! Average teleportation fidelity of binary-tree quantum repeater networks
//! whose links are Werner states.
//!
//! The crate computes `F_avg`, the mean over all source-target pairs of the
//! best teleportation fidelity, for four tree families (directed/undirected,
//! asymmetric/symmetric) by closed form, by census-weighted sums and by
//! explicit path enumeration, and cross-checks the per-path rule against an
//! exact density-matrix model of entanglement swapping.

pub mod analysis;
pub mod census;
pub mod error;
pub mod fidelity;
pub mod montecarlo;
pub mod numerics;
pub mod quantum;
pub mod tolerances;
pub mod topology;

pub use analysis::{
    advantage_threshold, asymptotic_profile, expected_me_threshold, expected_random_placement,
    me_placement, me_threshold, AsymptoticProfile, MePlacement, PlacementStrategy, ThresholdResult,
    CLASSICAL_LIMIT,
};
pub use census::{census_closed_form, census_enumerate, CensusMethod, PathCensus};
pub use error::{Error, Result};
pub use fidelity::{
    epsilon_of, favg_closed, favg_from_census, favg_weighted, FidelityMethod, FidelityReport,
    LinkParams, WeightedNetwork,
};
pub use montecarlo::{expectation_check, run_trials, ExpectationCheck, TrialBatch};
pub use quantum::{
    bell_state, chain_fidelity, correlation_matrix, entanglement_swap, teleportation_fidelity,
    werner_state, CorrelationMatrix, DensityMatrix, WernerParam,
};
pub use topology::{build_tree, depth_from_nodes, node_count, Edge, TreeKind, TreeTopology};

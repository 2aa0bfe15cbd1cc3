//! Committee elections on the line: ordinal rules, line-structure recovery
//! and exact distortion analysis.

pub mod bench;
pub mod costs;
pub mod distortion;
pub mod error;
pub mod generators;
pub mod io;
pub mod model;
pub mod optimal;
pub mod ordering;
pub mod rules;
pub mod scalar;
pub mod simplex;

pub use costs::{alternative_cost, social_cost, voter_cost, Objective};
pub use error::{Error, Result};
pub use model::{check_consistency, derive_profile, validate_election, Committee, ConsistencyMode, Election, LineMetric};
pub use optimal::{optimal_bruteforce, optimal_utilitarian, OptMethod, OptResult};
pub use ordering::{majority_order, order_alternatives, pairwise_margin, pareto_dominated, AlternativeOrder, MajorityOrder};
pub use rules::{compose, interior_committee, k_extremes, polar_general, polar_k2, polar_k3, rule_bound, Phase, RuleId};
pub use scalar::{Scalar, Surd};
pub use distortion::{
    adversarial_distortion, crossing_point, distortion_fixed, focal_point, move_voters, ratio_bound, AdversarialMode,
    AdversarialResult, FixedDistortion, FocalQuery, MoveConstraints,
};

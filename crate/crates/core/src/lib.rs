//! Exact arithmetic for Haros graphs: continued fractions and continuants,
//! the Farey (Stern–Brocot) tree, graph construction by concatenation, and
//! closed forms for the degree distribution `P(k, x)`.
//!
//! Everything is generic over an unsigned integer scalar ([`Natural`]); the
//! aliases below pick the usual concrete choices.

pub mod arith;
pub mod dist;
pub mod error;
pub mod farey;
pub mod graph;
pub mod scalar;
pub mod verify;

pub use arith::{cf_expand, cf_value, continuant, convergents, ContinuedFraction, ConvergentList};
pub use dist::{
    base_cases, float_to_rational, sweep, thm1_distribution, thm2_distribution, thm2_eval,
    thm2_eval_real, truncation_table, DegreeDistribution, SweepLimits, SweepRow, SweepTable,
    TruncationRow, TruncationTable,
};
pub use error::{HarosError, Result};
pub use farey::{
    ancestor_at_level, are_adjacent, farey_len, farey_sequence, level_of, locate_for_degree,
    mediant, symbolic_path, tree_children, tree_level, tree_level_nodes, tree_node, Bracket,
    BracketSide, Direction, EnclosingBracket, SymbolicPath, TreeLevel, TreeNode,
};
pub use graph::{
    build, build_with_cap, concat, degree_distribution_oracle, distribution_of, identify_boundary,
    oracle_with_cap, HarosGraph, IdentifiedDegreeMultiset,
};
pub use scalar::{Natural, Real};

pub use num_bigint::BigUint;
pub use num_rational::Ratio;

/// Arbitrary-precision natural number.
pub type BigNatural = BigUint;
/// Exact rational with arbitrary-precision parts.
pub type ExactRational = Ratio<BigUint>;
/// Exact rational over `u64`; overflow panics, so keep denominators modest.
pub type SmallRational = Ratio<u64>;

pub type ExactContinuedFraction = ContinuedFraction<BigUint>;
pub type ExactDistribution = DegreeDistribution<BigUint>;
pub type ExactGraph = HarosGraph<BigUint>;
pub type SmallDistribution = DegreeDistribution<u64>;

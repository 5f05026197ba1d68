//! Symmetry breaking for MaxSAT and its weighted and partial variants.
//!
//! A formula is encoded as a colored graph ([`graph`]), the graph's
//! automorphism group is searched ([`automorphism`]), each generator becomes
//! a lex-leader constraint added as hard clauses ([`sbp`]), and the
//! branch-and-bound [`solver`] (checked against an exhaustive oracle)
//! confirms that the optimum is unchanged.

pub mod automorphism;
pub mod dimacs;
pub mod formula;
pub mod graph;
pub mod instances;
pub mod perm;
pub mod pipeline;
pub mod sbp;
pub mod solver;

pub use automorphism::{detect_symmetries, find_automorphisms, GeneratorSet};
pub use dimacs::{parse_dimacs, serialize, ParseError};
pub use formula::{Assignment, Clause, Evaluation, Formula, Lit, Var, Variant, Weight, WeightedClause};
pub use graph::{encode, ColoredGraph, EncodeMode};
pub use perm::{apply, validate_on_formula, Permutation};
pub use sbp::{generate_sbps, lex_leader, Augmented, SbpResult};
pub use solver::{brute_force, solve_bnb, Budget, OptResult, Status};

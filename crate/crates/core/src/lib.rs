//! Verification of the ℓ1-recovery null space condition.
//!
//! Given a basis `H` (`n x m`) of the null space of a sensing matrix, the
//! condition holds for sparsity `k` iff `α_k < 1/2`, where `α_k` is the
//! largest fraction `‖z_K‖₁ / ‖z‖₁` over null-space vectors `z` and supports
//! `|K| <= k`. This crate computes polynomial-time upper bounds on `α_k`
//! ([`bounds`]) and its exact value by sandwiching ([`exact`]), checked
//! against brute force ([`oracle`]).

pub mod bounds;
pub mod cache;
pub mod combinatorics;
pub mod ensembles;
pub mod error;
pub mod exact;
pub mod lp;
pub mod matrix;
pub mod nullspace;
pub mod oracle;
pub mod settings;

pub use bounds::{
    beta_subset, pick_l_bound, pick_l_optimized_bound, pick_one_bound, score_all_subsets,
    AlphaValue, BoundMethod, BoundReport, ScoreTable, SubsetScore,
};
pub use error::{Error, Result};
pub use exact::{
    alpha_exact_on_set, cheap_upper_bound, find_max_certified_k, find_max_certified_k_with,
    lp_upper_bound, sandwich, sandwich_with_scores, Method, SandwichOutcome, SandwichTrace,
    TraceRow, VerificationReport,
};
pub use lp::{solve_lp, LpOutcome, LpProblem};
pub use matrix::{DenseMatrix, MatrixKind, MatrixMeta};
pub use nullspace::{null_space_basis, validate_basis, NullBasis};
pub use oracle::exhaustive_alpha;
pub use settings::Settings;

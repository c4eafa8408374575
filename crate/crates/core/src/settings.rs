use serde::{Deserialize, Serialize};

/// Numerical tolerances and enumeration limits shared by every computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    /// Feasibility tolerance of the simplex kernel.
    pub feas_tol: f64,
    /// Tolerance for GLB/CUB/LPUB comparisons in the sandwich loop.
    pub cmp_tol: f64,
    /// Relative bound on `max |A·H|`, scaled by the largest entry of `A`.
    pub basis_tol: f64,
    /// Largest number of subsets (or LP constraints) materialized at once.
    pub subset_limit: u64,
    /// Largest number of supports the exhaustive oracle will visit.
    pub oracle_limit: u64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            feas_tol: 1e-9,
            cmp_tol: 1e-9,
            basis_tol: 1e-10,
            subset_limit: 10_000_000,
            oracle_limit: 100_000,
        }
    }
}

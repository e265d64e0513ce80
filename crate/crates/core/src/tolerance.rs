use serde::{Deserialize, Serialize};

/// Coordinates with magnitude at or below this are treated as zero.
pub const ZERO_TOL: f64 = 1e-12;
/// Slack for mass-membership checks.
pub const MASS_TOL: f64 = 1e-9;
/// Row-sum slack for stochasticity audits.
pub const ROW_TOL: f64 = 1e-9;
/// Slack for "entry equals one" tests on diagonal rows.
pub const ONE_TOL: f64 = 1e-9;
/// L1 residual target for preimage solves.
pub const SOLVE_TOL: f64 = 1e-8;
/// L1 residual target for fixed points.
pub const FIX_TOL: f64 = 1e-9;

/// Bundle of tolerances threaded through checks and solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub zero: f64,
    pub mass: f64,
    pub row: f64,
    pub one: f64,
    pub solve: f64,
    pub fix: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            zero: ZERO_TOL,
            mass: MASS_TOL,
            row: ROW_TOL,
            one: ONE_TOL,
            solve: SOLVE_TOL,
            fix: FIX_TOL,
        }
    }
}

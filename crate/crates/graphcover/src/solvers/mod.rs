//! Linear assignment and linear programming.

mod hungarian;
mod lp;

pub use hungarian::{assignment, Assignment};
pub use lp::{certify, solve_lp, Certificate, Constraint, LpProblem, LpSolution, Relation};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("cost matrix contains a non-finite entry")]
    NonFinite,
    #[error("cost matrix is not square")]
    NotSquare,
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("simplex exceeded {0} iterations")]
    IterationLimit(usize),
}

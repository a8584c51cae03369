//! Capacity expressions: evaluation for a given input distribution,
//! maximization over distributions, and consistency checks.

mod constraints;
mod objective;
mod param;
mod region;
mod solver;
mod special;
mod toy;

pub use constraints::{build_constraints, fm_consistency_check, ConstraintSystem, FmReport, LinearConstraint};
pub use objective::{
    eval_objective, eval_terms, ActiveConstraint, MacPolytope, MacTerms, Objective, RatePoint, RelayTerms, Terms,
    MEMBERSHIP_TOLERANCE,
};
pub use param::{
    build_joint, cardinality_cap, default_u_size, Axes, FactorTable, MacAxes, PmfParameterization, RelayAxes,
};
pub use region::{BoundaryPoint, Generator, RateRegion};
pub use solver::{solve, BoundaryMode, MapMode, Optimum, Solution, SolveInfo, SolverSettings};
pub use special::{
    check_no_cribbing, compare_restricted_causal_mac, compare_single_state_relay, special_case_checks,
    SpecialCaseOutcome, SpecialCasePairings,
};
pub use toy::toy_rates;

//! Problem configuration, oracles and experiment runners.

pub mod config;
pub mod invariants;
pub mod oracle;
pub mod problem;
pub mod study;

pub use config::{OracleChoice, ProblemConfig};
pub use oracle::{convex_conjugate, hopf_lax_oracle, reference_solution};
pub use problem::{Problem, Profile};
pub use study::{convergence_study, solve, trajectory_csv, ConvergenceRow, ConvergenceStudy};

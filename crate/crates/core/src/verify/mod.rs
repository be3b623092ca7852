//! Independent numerical oracles for the precoder design.

mod hessian;
mod oracle;
mod probe;

pub use hessian::{hessian_check, reduced_objective, HessianSummary, DEFAULT_FD_STEP};
pub use oracle::{brute_force_real, OracleResult};
pub use probe::{conjecture_probe, ProbeReport};

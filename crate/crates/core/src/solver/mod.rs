//! Explicit monotone finite-volume solver on periodic grids, with discrete
//! checks of conservation, the maximum principle, comparison and the entropy
//! inequalities.

mod entropy;
mod evolve;
mod scheme;

pub use entropy::{
    EntropyEntry, EntropyMonitor, EntropyReport, TestFunction, ENTROPY_TOL_PER_LENGTH,
};
pub use evolve::{
    compare, entropy_residual, evolve, evolve_monitored, model_hash, ComparisonReport,
    InitialOrder, InvariantRecord, SolverConfig, Trajectory, TrajectoryManifest, DEFAULT_CFL,
};
pub use scheme::{step, step_with, ConvectionFlux, Scheme, Stepper, BOUND_TOL};

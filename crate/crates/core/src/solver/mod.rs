//! Deterministic solution operators and per-trajectory diagnostics.

mod config;
mod diagnostics;
mod integrator;
mod trajectory;

pub use config::{Scheme, SolverConfig, DEFAULT_GUARD_TOL, GUARD_FRACTION};
pub use diagnostics::{
    apriori_report, power_cutoff, q_label, relative_energy_gap, renormalized_residual, trapezoid,
    vorticity_norm, weak_form_residual, AprioriOptions, BallSeries, DiagnosticsReport, GapPoint,
    RearrangementCheck, TestField, REARRANGEMENT_TOL,
};
pub use integrator::{solve, step, viscous_split_step, FlowSolver, CFL};
pub use trajectory::Trajectory;

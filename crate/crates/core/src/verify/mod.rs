//! Verdicts for the statistical laws and the convergence studies.

mod laws;
mod report;
mod studies;

pub use laws::{
    dirac_collapse_residual, equality_expected, foias_liouville_residual, verify_energy_inequality,
    verify_vorticity_law, ENERGY_TOL, VORTICITY_EQUALITY_TOL, VORTICITY_INEQUALITY_TOL,
};
pub use report::{format_float, verdicts_csv, Comparison, VerdictReport, CSV_HEADER};
pub use studies::{
    inviscid_limit_study, mollify_measure, uniqueness_probe, CauchyTable, InviscidTable,
};

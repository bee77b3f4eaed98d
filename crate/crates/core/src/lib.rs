//! Ensemble simulation of statistical solutions of the 2D incompressible
//! Euler and Navier-Stokes equations in vorticity form.
//!
//! The crate is organised bottom-up:
//!
//! * [`spectral`]: periodic grids, FFT-based Biot-Savart inversion, norms, mollification.
//! * [`radial`]: the fixed stationary vortex `Σ` and the decomposition `u = mΣ + u_kin`.
//! * [`solver`]: deterministic solution operators and per-trajectory diagnostics.
//! * [`ensemble`]: Dirac-mixture measures, push-forward, cylindrical functionals, distances.
//! * [`verify`]: verdicts for the statistical energy/vorticity laws, the Foias-Liouville
//!   equation, the inviscid limit and the mollification Cauchy probe.
//! * [`snapshot`]: the binary `EUST` snapshot format.

pub mod ensemble;
pub mod error;
pub mod quadrature;
pub mod radial;
pub mod reduce;
pub mod smooth;
pub mod snapshot;
pub mod solver;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};

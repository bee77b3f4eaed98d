use crate::error::{Error, Result};

/// Time integrator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Exact spectral heat factor with RK4 on advection (Lawson RK4).
    IntegratingFactorRk4,
    /// Strang splitting: half heat step, full Euler RK4 step, half heat step.
    ViscousSplitting,
}

impl Scheme {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::IntegratingFactorRk4 => "integrating_factor_rk4",
            Scheme::ViscousSplitting => "viscous_splitting",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "integrating_factor_rk4" => Some(Scheme::IntegratingFactorRk4),
            "viscous_splitting" => Some(Scheme::ViscousSplitting),
            _ => None,
        }
    }
}

/// Default ratio `max |ω_kin|` on the guard annulus / `max |ω_kin|` that
/// triggers [`Error::BoundaryLeak`].
pub const DEFAULT_GUARD_TOL: f64 = 1e-8;

/// Nodes whose sup-distance from the centre exceeds this fraction of the
/// box half-width form the guard annulus.
pub const GUARD_FRACTION: f64 = 0.75;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    nu: f64,
    dt: f64,
    horizon_t: f64,
    save_times: Vec<f64>,
    scheme: Scheme,
    boundary_guard_tol: Option<f64>,
}

impl SolverConfig {
    pub fn new(nu: f64, dt: f64, horizon_t: f64, save_times: Vec<f64>, scheme: Scheme) -> Result<Self> {
        if !(nu >= 0.0 && nu.is_finite()) {
            return Err(Error::InvalidArgument(format!("nu = {nu}; need nu >= 0")));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("dt = {dt}; need dt > 0")));
        }
        if !(horizon_t > 0.0 && horizon_t.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "horizon_T = {horizon_t}; need horizon_T > 0"
            )));
        }
        if save_times.first() != Some(&0.0) || save_times.last() != Some(&horizon_t) {
            return Err(Error::InvalidArgument(
                "save_times must start at 0 and end at horizon_T".into(),
            ));
        }
        if save_times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument(
                "save_times must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            nu,
            dt,
            horizon_t,
            save_times,
            scheme,
            boundary_guard_tol: Some(DEFAULT_GUARD_TOL),
        })
    }

    /// `count + 1` equally spaced save times on `[0, horizon_T]`.
    pub fn uniform(nu: f64, dt: f64, horizon_t: f64, count: usize, scheme: Scheme) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidArgument("need at least one save interval".into()));
        }
        let mut times: Vec<f64> = (0..=count)
            .map(|k| horizon_t * k as f64 / count as f64)
            .collect();
        times[count] = horizon_t;
        Self::new(nu, dt, horizon_t, times, scheme)
    }

    /// Sets (or with `None` disables) the guard-annulus leak check.
    pub fn with_guard_tol(mut self, tol: Option<f64>) -> Self {
        self.boundary_guard_tol = tol;
        self
    }

    pub fn with_nu(mut self, nu: f64) -> Result<Self> {
        if !(nu >= 0.0 && nu.is_finite()) {
            return Err(Error::InvalidArgument(format!("nu = {nu}; need nu >= 0")));
        }
        self.nu = nu;
        Ok(self)
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn horizon_t(&self) -> f64 {
        self.horizon_t
    }

    pub fn save_times(&self) -> &[f64] {
        &self.save_times
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn boundary_guard_tol(&self) -> Option<f64> {
        self.boundary_guard_tol
    }

    /// Number of steps and the shrunk step size for save interval `k`.
    pub fn interval_steps(&self, k: usize) -> (usize, f64) {
        let span = self.save_times[k + 1] - self.save_times[k];
        let steps = ((span / self.dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        (steps, span / steps as f64)
    }

    /// Index of `t` in the save times (exact up to 1e-12 relative to `T`).
    pub fn save_index(&self, t: f64) -> Result<usize> {
        let tol = 1e-12 * self.horizon_t.max(1.0);
        self.save_times
            .iter()
            .position(|&s| (s - t).abs() <= tol)
            .ok_or(Error::TimeNotSaved(t))
    }
}

//! Pseudo-spectral time stepping of the perturbation vorticity `ω̃ = ω - m ω_Σ`.
//!
//! The evolved equation is
//!
//! ```text
//! ∂_t ω̃ + (mΣ + ũ)·∇ω̃ + ũ·∇(m ω_Σ) = νΔω̃ + ν m Δω_Σ,   ũ = K * ω̃,
//! ```
//!
//! with `Σ`, `∇ω_Σ` and `Δω_Σ` taken from their closed forms. Products are
//! formed on the grid and truncated to the 2/3 band; the zero mode of the
//! right-hand side is removed so `ω̃` stays mean-zero.

use std::sync::Arc;

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::radial::{StationaryField, VorticityState};
use crate::spectral::{Fft2, Grid, ScalarField};

use super::config::{Scheme, SolverConfig, GUARD_FRACTION};
use super::trajectory::Trajectory;

/// Advective CFL number: `dt ≤ CFL · h / max|u|`.
pub const CFL: f64 = 0.5;

type Spectrum = Vec<Complex64>;

/// One solver instance per trajectory; owns its FFT plans and workspaces.
pub struct FlowSolver {
    sigma: Arc<StationaryField>,
    cfg: SolverConfig,
    grid: Grid,
    fft: Fft2,
    dkx: Vec<f64>,
    dky: Vec<f64>,
    k2: Vec<f64>,
    keep: Vec<bool>,
    lap_sigma_hat: Spectrum,
    guard: Vec<usize>,
}

impl FlowSolver {
    pub fn new(sigma: Arc<StationaryField>, cfg: SolverConfig) -> Self {
        let grid = *sigma.grid();
        let n = grid.n();
        let mut fft = Fft2::new(n);
        let dkx: Vec<f64> = (0..n).map(|a| grid.derivative_wavenumber(a)).collect();
        let dky = dkx.clone();
        let mut k2 = vec![0.0; n * n];
        let mut keep = vec![false; n * n];
        for a in 0..n {
            for b in 0..n {
                let (kx, ky) = (grid.wavenumber(a), grid.wavenumber(b));
                k2[a * n + b] = kx * kx + ky * ky;
                keep[a * n + b] = grid.keeps_mode(a) && grid.keeps_mode(b);
            }
        }
        let mut lap_sigma_hat = fft.forward_real(sigma.laplacian_omega().values());
        for (c, &k) in lap_sigma_hat.iter_mut().zip(&keep) {
            if !k {
                *c = Complex64::default();
            }
        }
        lap_sigma_hat[0] = Complex64::default();
        let guard = (0..grid.len())
            .filter(|&idx| grid.sup_radius_fraction(idx) >= GUARD_FRACTION)
            .collect();
        Self {
            sigma,
            cfg,
            grid,
            fft,
            dkx,
            dky,
            k2,
            keep,
            lap_sigma_hat,
            guard,
        }
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn sigma(&self) -> &Arc<StationaryField> {
        &self.sigma
    }

    fn to_spectrum(&mut self, field: &ScalarField) -> Spectrum {
        let mut s = self.fft.forward_real(field.values());
        self.truncate(&mut s);
        s
    }

    fn truncate(&self, s: &mut [Complex64]) {
        for (c, &k) in s.iter_mut().zip(&self.keep) {
            if !k {
                *c = Complex64::default();
            }
        }
    }

    fn to_physical(&mut self, w: &[Complex64]) -> Vec<f64> {
        self.fft.inverse_real(w.to_vec())
    }

    /// Advection part of the right-hand side in spectral space. With
    /// `cfl_dt = Some(dt)` the CFL bound is checked against this stage's velocity.
    fn advection(&mut self, w: &[Complex64], m: f64, cfl: Option<(f64, f64)>) -> Result<Spectrum> {
        let n = self.grid.n();
        let len = n * n;
        let mut u1 = vec![Complex64::default(); len];
        let mut u2 = vec![Complex64::default(); len];
        let mut wx = vec![Complex64::default(); len];
        let mut wy = vec![Complex64::default(); len];
        for a in 0..n {
            let kx = self.dkx[a];
            for b in 0..n {
                let idx = a * n + b;
                let ky = self.dky[b];
                let k2 = self.k2[idx];
                let psi = if k2 == 0.0 { Complex64::default() } else { -w[idx] / k2 };
                let i = Complex64::new(0.0, 1.0);
                u1[idx] = -(i * ky) * psi;
                u2[idx] = (i * kx) * psi;
                wx[idx] = (i * kx) * w[idx];
                wy[idx] = (i * ky) * w[idx];
            }
        }
        for buf in [&mut u1, &mut u2, &mut wx, &mut wy] {
            self.fft.inverse(buf);
        }
        let sv = self.sigma.velocity();
        let (s1, s2) = (sv.u1.values(), sv.u2.values());
        let go = self.sigma.grad_omega();
        let (g1, g2) = (go.u1.values(), go.u2.values());
        let mut max_speed = 0.0_f64;
        let mut out = vec![Complex64::default(); len];
        for idx in 0..len {
            let (a1, a2) = (u1[idx].re, u2[idx].re);
            let v1 = m * s1[idx] + a1;
            let v2 = m * s2[idx] + a2;
            max_speed = max_speed.max(v1.hypot(v2));
            let adv = v1 * wx[idx].re + v2 * wy[idx].re + m * (a1 * g1[idx] + a2 * g2[idx]);
            out[idx] = Complex64::new(-adv, 0.0);
        }
        if let Some((dt, time)) = cfl {
            let limit = CFL * self.grid.spacing() / max_speed;
            if max_speed > 0.0 && dt > limit {
                return Err(Error::CflViolation { time, dt, limit });
            }
        }
        self.fft.forward(&mut out);
        self.truncate(&mut out);
        out[0] = Complex64::default();
        Ok(out)
    }

    /// Full right-hand side for the integrating-factor scheme (advection plus
    /// the viscous source `ν m Δω_Σ`).
    fn rhs_if(&mut self, w: &[Complex64], m: f64, cfl: Option<(f64, f64)>) -> Result<Spectrum> {
        let mut out = self.advection(w, m, cfl)?;
        let c = self.cfg.nu() * m;
        if c != 0.0 {
            for (o, l) in out.iter_mut().zip(&self.lap_sigma_hat) {
                *o += l * c;
            }
        }
        Ok(out)
    }

    fn heat_factor(&self, tau: f64) -> Vec<f64> {
        let nu = self.cfg.nu();
        self.k2.iter().map(|k2| (-nu * k2 * tau).exp()).collect()
    }

    fn if_rk4(&mut self, w: &mut Spectrum, m: f64, dt: f64, time: f64) -> Result<()> {
        let e = self.heat_factor(0.5 * dt);
        let len = w.len();
        let k1 = self.rhs_if(w, m, Some((dt, time)))?;
        let y2: Spectrum = (0..len).map(|i| e[i] * (w[i] + k1[i] * (0.5 * dt))).collect();
        let k2 = self.rhs_if(&y2, m, None)?;
        let y3: Spectrum = (0..len).map(|i| e[i] * w[i] + k2[i] * (0.5 * dt)).collect();
        let k3 = self.rhs_if(&y3, m, None)?;
        let y4: Spectrum = (0..len).map(|i| e[i] * (e[i] * w[i] + k3[i] * dt)).collect();
        let k4 = self.rhs_if(&y4, m, None)?;
        for i in 0..len {
            let e2 = e[i] * e[i];
            w[i] = e2 * w[i]
                + (k1[i] * e2 + (k2[i] + k3[i]) * (2.0 * e[i]) + k4[i]) * (dt / 6.0);
        }
        Ok(())
    }

    /// Exact solution of `∂_t ω̃ = νΔω̃ + ν m Δω_Σ` over `tau`.
    fn heat(&self, w: &mut Spectrum, m: f64, tau: f64) {
        let nu = self.cfg.nu();
        if nu == 0.0 {
            return;
        }
        for i in 0..w.len() {
            let k2 = self.k2[i];
            if k2 == 0.0 {
                continue;
            }
            let e = (-nu * k2 * tau).exp();
            let steady = self.lap_sigma_hat[i] * (m / k2);
            w[i] = w[i] * e + steady * (1.0 - e);
        }
    }

    fn split(&mut self, w: &mut Spectrum, m: f64, dt: f64, time: f64) -> Result<()> {
        self.heat(w, m, 0.5 * dt);
        let len = w.len();
        let k1 = self.advection(w, m, Some((dt, time)))?;
        let y2: Spectrum = (0..len).map(|i| w[i] + k1[i] * (0.5 * dt)).collect();
        let k2 = self.advection(&y2, m, None)?;
        let y3: Spectrum = (0..len).map(|i| w[i] + k2[i] * (0.5 * dt)).collect();
        let k3 = self.advection(&y3, m, None)?;
        let y4: Spectrum = (0..len).map(|i| w[i] + k3[i] * dt).collect();
        let k4 = self.advection(&y4, m, None)?;
        for i in 0..len {
            w[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (dt / 6.0);
        }
        self.heat(w, m, 0.5 * dt);
        Ok(())
    }

    fn advance(&mut self, w: &mut Spectrum, m: f64, dt: f64, time: f64, scheme: Scheme) -> Result<()> {
        match scheme {
            Scheme::IntegratingFactorRk4 => self.if_rk4(w, m, dt, time)?,
            Scheme::ViscousSplitting => self.split(w, m, dt, time)?,
        }
        if let Some(tol) = self.cfg.boundary_guard_tol() {
            let values = self.to_physical(w);
            self.check_guard(&values, time + dt, tol)?;
        }
        Ok(())
    }

    fn check_guard(&self, values: &[f64], time: f64, tol: f64) -> Result<()> {
        let max = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if max == 0.0 {
            return Ok(());
        }
        let edge = self.guard.iter().fold(0.0_f64, |m, &i| m.max(values[i].abs()));
        let ratio = edge / max;
        if ratio > tol {
            return Err(Error::BoundaryLeak { time, ratio, tol });
        }
        Ok(())
    }

    fn checked_grid(&self, state: &VorticityState) -> Result<()> {
        self.grid.same_as(state.grid())
    }

    fn one_step(&mut self, state: &VorticityState, time: f64, scheme: Scheme) -> Result<VorticityState> {
        self.checked_grid(state)?;
        let mut w = self.to_spectrum(state.omega_kin());
        self.advance(&mut w, state.m(), self.cfg.dt(), time, scheme)?;
        let values = self.to_physical(&w);
        Ok(VorticityState::from_parts(
            state.m(),
            ScalarField::from_values(self.grid, values),
        ))
    }

    /// One integrating-factor RK4 step of size `cfg.dt` starting at `time`.
    pub fn step(&mut self, state: &VorticityState, time: f64) -> Result<VorticityState> {
        self.one_step(state, time, Scheme::IntegratingFactorRk4)
    }

    /// One Strang viscous-splitting step of size `cfg.dt` starting at `time`.
    pub fn viscous_split_step(&mut self, state: &VorticityState, time: f64) -> Result<VorticityState> {
        self.one_step(state, time, Scheme::ViscousSplitting)
    }

    /// Integrates from `t = 0` to `horizon_T`, landing exactly on every save time.
    pub fn solve(&mut self, state0: &VorticityState) -> Result<Trajectory> {
        self.checked_grid(state0)?;
        if let Some(tol) = self.cfg.boundary_guard_tol() {
            self.check_guard(state0.omega_kin().values(), 0.0, tol)?;
        }
        let m = state0.m();
        let scheme = self.cfg.scheme();
        let saves = self.cfg.save_times().to_vec();
        let mut states = Vec::with_capacity(saves.len());
        states.push(state0.clone());
        let mut w = self.to_spectrum(state0.omega_kin());
        for k in 0..saves.len() - 1 {
            let (steps, dt) = self.cfg.interval_steps(k);
            for s in 0..steps {
                let time = saves[k] + s as f64 * dt;
                self.advance(&mut w, m, dt, time, scheme)?;
            }
            let values = self.to_physical(&w);
            states.push(VorticityState::from_parts(
                m,
                ScalarField::from_values(self.grid, values),
            ));
        }
        Ok(Trajectory::from_parts(
            self.cfg.clone(),
            Arc::clone(&self.sigma),
            saves,
            states,
        ))
    }
}

/// One integrating-factor RK4 step from `t = 0`.
pub fn step(state: &VorticityState, sigma: &Arc<StationaryField>, cfg: &SolverConfig) -> Result<VorticityState> {
    FlowSolver::new(Arc::clone(sigma), cfg.clone()).step(state, 0.0)
}

/// One Strang splitting step from `t = 0`.
pub fn viscous_split_step(
    state: &VorticityState,
    sigma: &Arc<StationaryField>,
    cfg: &SolverConfig,
) -> Result<VorticityState> {
    FlowSolver::new(Arc::clone(sigma), cfg.clone()).viscous_split_step(state, 0.0)
}

/// Solves from `state0` over `[0, horizon_T]` with the configured scheme.
pub fn solve(state0: &VorticityState, sigma: &Arc<StationaryField>, cfg: &SolverConfig) -> Result<Trajectory> {
    FlowSolver::new(Arc::clone(sigma), cfg.clone()).solve(state0)
}

//! The stationary vortex `Σ` and the radial-energy decomposition `u = mΣ + u_kin`.
//!
//! `Σ` is generated by a scaled bump profile `g` with `2π ∫₀^∞ s g(s) ds = 1`:
//!
//! ```text
//! Σ(x) = x⊥ / |x|² · F(|x|),   F(r) = ∫₀^r s g(s) ds,   curl Σ = g(|x|).
//! ```
//!
//! Velocities, vorticity derivatives and the gradient bound are evaluated from
//! these closed forms, never by differencing on the grid.

use std::collections::HashMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature;
use crate::spectral::{biot_savart, Grid, ScalarField, VectorField};

/// Number of radial mesh points used to maximise `|∇Σ|` and `|Σ|`.
pub const RADIAL_MESH: usize = 100_000;

const QUAD_TOL: f64 = 1e-17;

fn unit_bump(t2: f64) -> f64 {
    if t2 < 1.0 {
        (-1.0 / (1.0 - t2)).exp()
    } else {
        0.0
    }
}

/// `∫₀^t τ exp(-1/(1-τ²)) dτ`.
fn unit_moment(a: f64, b: f64) -> f64 {
    quadrature::integrate(|t| t * unit_bump(t * t), a.min(1.0), b.min(1.0), QUAD_TOL)
}

/// `g(s) = C_g exp(-1/(1-(s/R)²))` on `s < R`, zero outside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialProfile {
    support_radius: f64,
    amplitude: f64,
}

impl RadialProfile {
    /// Profile with the amplitude fixed by unit total vorticity.
    pub fn normalized(support_radius: f64) -> Result<Self> {
        if !(support_radius > 0.0 && support_radius.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "support_radius = {support_radius}; need > 0"
            )));
        }
        let moment = unit_moment(0.0, 1.0);
        let amplitude = 1.0 / (2.0 * PI * support_radius * support_radius * moment);
        Ok(Self {
            support_radius,
            amplitude,
        })
    }

    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn g(&self, s: f64) -> f64 {
        let t = s / self.support_radius;
        self.amplitude * unit_bump(t * t)
    }

    /// `g'(s)`.
    pub fn dg(&self, s: f64) -> f64 {
        let r2 = self.support_radius * self.support_radius;
        let q = s * s / r2;
        if q >= 1.0 {
            return 0.0;
        }
        let one_minus = 1.0 - q;
        self.g(s) * (-2.0 * s / (r2 * one_minus * one_minus))
    }

    /// `Δ g(|x|) = g'' + g'/s`.
    pub fn laplacian(&self, s: f64) -> f64 {
        let r2 = self.support_radius * self.support_radius;
        let q = s * s / r2;
        if q >= 1.0 {
            return 0.0;
        }
        let om = 1.0 - q;
        let phi = -2.0 * s / (r2 * om * om);
        let dphi = -2.0 / (r2 * om * om) - 8.0 * s * s / (r2 * r2 * om * om * om);
        let phi_over_s = -2.0 / (r2 * om * om);
        self.g(s) * (phi * phi + dphi + phi_over_s)
    }

    /// `F(r) = ∫₀^r s g(s) ds`; equals `1/(2π)` for `r ≥ R`.
    pub fn enclosed(&self, r: f64) -> f64 {
        self.enclosed_between(0.0, r)
    }

    fn enclosed_between(&self, r0: f64, r1: f64) -> f64 {
        let big_r = self.support_radius;
        if r0 >= big_r {
            return 0.0;
        }
        if r0 == 0.0 && r1 >= big_r {
            return 1.0 / (2.0 * PI);
        }
        self.amplitude * big_r * big_r * unit_moment(r0 / big_r, r1 / big_r)
    }

    /// Pointwise operator norm of `∇Σ` at radius `r`, from `F` and `g`.
    fn grad_norm(&self, r: f64, enclosed: f64) -> f64 {
        if r == 0.0 {
            return 0.5 * self.g(0.0);
        }
        let h = enclosed / (r * r);
        h.abs().max((self.g(r) - h).abs())
    }
}

/// The fixed stationary field `Σ` sampled on a grid, with its analytic data.
#[derive(Debug, Clone)]
pub struct StationaryField {
    profile: RadialProfile,
    grid: Grid,
    velocity: VectorField,
    omega: ScalarField,
    grad_velocity: [ScalarField; 4],
    grad_omega: VectorField,
    laplacian_omega: ScalarField,
    discrete_mass: f64,
    grad_sup_norm: f64,
    sup_norm: f64,
}

impl StationaryField {
    pub fn profile(&self) -> &RadialProfile {
        &self.profile
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// `Σ` at the grid nodes.
    pub fn velocity(&self) -> &VectorField {
        &self.velocity
    }

    /// `ω_Σ = g(|x|)` at the grid nodes.
    pub fn omega(&self) -> &ScalarField {
        &self.omega
    }

    /// Analytic `[∂_x Σ1, ∂_y Σ1, ∂_x Σ2, ∂_y Σ2]` at the grid nodes.
    pub fn grad_velocity(&self) -> &[ScalarField; 4] {
        &self.grad_velocity
    }

    /// Analytic `∇ω_Σ` at the grid nodes.
    pub fn grad_omega(&self) -> &VectorField {
        &self.grad_omega
    }

    /// Analytic `Δω_Σ` at the grid nodes.
    pub fn laplacian_omega(&self) -> &ScalarField {
        &self.laplacian_omega
    }

    /// Trapezoidal `∫ ω_Σ` on the grid.
    pub fn discrete_mass(&self) -> f64 {
        self.discrete_mass
    }

    /// `‖∇Σ‖_{L∞}` (pointwise operator norm).
    pub fn grad_sup_norm(&self) -> f64 {
        self.grad_sup_norm
    }

    /// `‖Σ‖_{L∞}`.
    pub fn sup_norm(&self) -> f64 {
        self.sup_norm
    }

    /// Closed-form `Σ(x, y)`.
    pub fn velocity_at(&self, x: f64, y: f64) -> (f64, f64) {
        let r2 = x * x + y * y;
        if r2 == 0.0 {
            return (0.0, 0.0);
        }
        let h = self.profile.enclosed(r2.sqrt()) / r2;
        (-y * h, x * h)
    }
}

/// Builds `Σ` for the given support radius and samples it on `grid`.
pub fn build_sigma(support_radius: f64, grid: Grid) -> Result<StationaryField> {
    let max = grid.box_half_width() / 4.0;
    if support_radius > max {
        return Err(Error::SupportTooLarge {
            radius: support_radius,
            max,
        });
    }
    let profile = RadialProfile::normalized(support_radius)?;

    // F(r) at every distinct node radius, accumulated along sorted radii.
    let mut r2_keys: Vec<u64> = (0..grid.len())
        .map(|idx| {
            let (x, y) = grid.point(idx);
            (x * x + y * y).to_bits()
        })
        .collect();
    r2_keys.sort_unstable();
    r2_keys.dedup();
    let mut enclosed: HashMap<u64, f64> = HashMap::with_capacity(r2_keys.len());
    let (mut acc, mut prev) = (0.0, 0.0);
    for key in r2_keys {
        let r = f64::from_bits(key).sqrt();
        if r >= support_radius {
            enclosed.insert(key, 1.0 / (2.0 * PI));
            continue;
        }
        acc += profile.enclosed_between(prev, r);
        prev = r;
        enclosed.insert(key, acc);
    }

    let velocity = VectorField::from_fn(grid, |x, y| {
        let r2 = x * x + y * y;
        if r2 == 0.0 {
            return (0.0, 0.0);
        }
        let h = enclosed[&r2.to_bits()] / r2;
        (-y * h, x * h)
    });
    // Σ = h(r) x⊥ with h = F/r², h' = g/r - 2F/r³.
    let grad_at = |x: f64, y: f64| -> [f64; 4] {
        let r2 = x * x + y * y;
        if r2 == 0.0 {
            let h0 = 0.5 * profile.g(0.0);
            return [0.0, -h0, h0, 0.0];
        }
        let r = r2.sqrt();
        let f = enclosed[&r2.to_bits()];
        let h = f / r2;
        let dh_over_r = profile.g(r) / r2 - 2.0 * f / (r2 * r2);
        [-x * y * dh_over_r, -h - y * y * dh_over_r, h + x * x * dh_over_r, x * y * dh_over_r]
    };
    let grad_velocity = [0, 1, 2, 3].map(|c| ScalarField::from_fn(grid, |x, y| grad_at(x, y)[c]));
    let omega = ScalarField::from_fn(grid, |x, y| profile.g(x.hypot(y)));
    let grad_omega = VectorField::from_fn(grid, |x, y| {
        let r = x.hypot(y);
        if r == 0.0 {
            return (0.0, 0.0);
        }
        let d = profile.dg(r) / r;
        (d * x, d * y)
    });
    let laplacian_omega = ScalarField::from_fn(grid, |x, y| profile.laplacian(x.hypot(y)));
    let discrete_mass = omega.integral();

    let (grad_sup_norm, sup_norm) = radial_maxima(&profile);

    Ok(StationaryField {
        profile,
        grid,
        velocity,
        omega,
        grad_velocity,
        grad_omega,
        laplacian_omega,
        discrete_mass,
        grad_sup_norm,
        sup_norm,
    })
}

/// `(sup |∇Σ|, sup |Σ|)` over a uniform radial mesh on `[0, R]`; both
/// quantities decay monotonically beyond the support.
fn radial_maxima(profile: &RadialProfile) -> (f64, f64) {
    let big_r = profile.support_radius();
    let dr = big_r / RADIAL_MESH as f64;
    let mut grad = profile.grad_norm(0.0, 0.0);
    let mut sup = 0.0_f64;
    let mut acc = 0.0;
    for k in 1..=RADIAL_MESH {
        let (r0, r1) = ((k - 1) as f64 * dr, k as f64 * dr);
        acc += profile.enclosed_between(r0, r1);
        grad = grad.max(profile.grad_norm(r1, acc));
        sup = sup.max(acc / r1);
    }
    (grad, sup)
}

/// Flow state `u = mΣ + u_kin`, stored through the vorticity of the kinetic part.
#[derive(Debug, Clone, PartialEq)]
pub struct VorticityState {
    m: f64,
    omega_kin: ScalarField,
}

impl VorticityState {
    /// Validates that the kinetic vorticity has zero mean.
    pub fn new(m: f64, omega_kin: ScalarField) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::InvalidArgument(format!("m = {m}")));
        }
        let mean = omega_kin.mean();
        let max_abs = omega_kin.max_abs();
        if mean.abs() > 1e-12 * max_abs {
            return Err(Error::NonZeroMean { mean, max_abs });
        }
        Ok(Self { m, omega_kin })
    }

    pub(crate) fn from_parts(m: f64, omega_kin: ScalarField) -> Self {
        Self { m, omega_kin }
    }

    /// Pure stationary state `mΣ`.
    pub fn stationary(m: f64, grid: Grid) -> Self {
        Self::from_parts(m, ScalarField::zeros(grid))
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn omega_kin(&self) -> &ScalarField {
        &self.omega_kin
    }

    pub fn grid(&self) -> &Grid {
        self.omega_kin.grid()
    }

    /// Total vorticity `m ω_Σ + ω_kin`.
    pub fn reconstruct(&self, sigma: &StationaryField) -> Result<ScalarField> {
        sigma.omega().scaled(self.m).add_scaled(1.0, &self.omega_kin)
    }

    /// `u_kin = K * ω_kin`.
    pub fn kinetic_velocity(&self) -> Result<VectorField> {
        biot_savart(&self.omega_kin)
    }

    /// Full velocity `mΣ + u_kin`.
    pub fn velocity(&self, sigma: &StationaryField) -> Result<VectorField> {
        sigma.grid().same_as(self.grid())?;
        sigma
            .velocity()
            .scaled(self.m)
            .add_scaled(1.0, &self.kinetic_velocity()?)
    }
}

/// Splits a total vorticity into `m` and a mean-zero kinetic part.
///
/// `m` is measured against the discrete mass of `ω_Σ`, which keeps the kinetic
/// part mean-zero to rounding on any grid.
pub fn decompose(omega_total: &ScalarField, sigma: &StationaryField) -> Result<VorticityState> {
    sigma.grid().same_as(omega_total.grid())?;
    let m = omega_total.integral() / sigma.discrete_mass();
    let omega_kin = omega_total.add_scaled(-m, sigma.omega())?;
    Ok(VorticityState::from_parts(m, omega_kin))
}

/// `‖u‖_𝔼 = |m| + ‖u_kin‖_{L²}`.
pub fn e_norm(state: &VorticityState, sigma: &StationaryField) -> Result<f64> {
    sigma.grid().same_as(state.grid())?;
    Ok(state.m().abs() + state.kinetic_velocity()?.l2_norm())
}

/// `a = exp(T ‖∇Σ‖_{L∞})`.
pub fn constant_a(horizon_t: f64, sigma: &StationaryField) -> Result<f64> {
    if !(horizon_t > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "horizon_T = {horizon_t}; need > 0"
        )));
    }
    Ok((horizon_t * sigma.grad_sup_norm()).exp())
}

/// `γ(u₀) = (1 + ‖u_{0,kin}‖_{L²}) a^{|m|}`.
pub fn gamma(state0: &VorticityState, sigma: &StationaryField, horizon_t: f64) -> Result<f64> {
    let a = constant_a(horizon_t, sigma)?;
    let kin = state0.kinetic_velocity()?.l2_norm();
    Ok((1.0 + kin) * a.powf(state0.m().abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::spectral_norm_2x2;

    fn sigma(n: usize, l: f64, r: f64) -> StationaryField {
        build_sigma(r, Grid::new(n, l).unwrap()).unwrap()
    }

    #[test]
    fn unit_mass() {
        let p = RadialProfile::normalized(0.7).unwrap();
        let m = 2.0 * PI * quadrature::integrate(|s| s * p.g(s), 0.0, 0.7, 1e-15);
        assert!((m - 1.0).abs() < 1e-12);
        // The lattice sum converges fast but needs ~64 cells per radius for 1e-8.
        let s = sigma(512, 4.0, 1.0);
        assert!((s.discrete_mass() - 1.0).abs() < 1e-8, "{}", s.discrete_mass());
    }

    #[test]
    fn far_field_is_point_vortex() {
        let s = sigma(64, 4.0, 1.0);
        let g = *s.grid();
        let mut checked = 0;
        for idx in 0..g.len() {
            let (x, y) = g.point(idx);
            let r = x.hypot(y);
            if r > 1.0 {
                let mag = s.velocity().u1.values()[idx].hypot(s.velocity().u2.values()[idx]);
                assert!((mag - 1.0 / (2.0 * PI * r)).abs() < 1e-10);
                checked += 1;
            }
        }
        assert!(checked > 1000);
        let centre = 32 * 64 + 32;
        assert_eq!(g.point(centre), (0.0, 0.0));
        assert_eq!(s.velocity().u1.values()[centre], 0.0);
        assert_eq!(s.velocity().u2.values()[centre], 0.0);
        assert_eq!(s.velocity_at(0.0, 0.0), (0.0, 0.0));
    }

    #[test]
    fn closed_form_gradient_matches_spectral_curl() {
        // curl Σ from the analytic gradient must equal g(|x|).
        let s = sigma(64, 4.0, 1.0);
        let [_, d12, d21, _] = s.grad_velocity();
        for idx in 0..s.grid().len() {
            let w = d21.values()[idx] - d12.values()[idx];
            assert!((w - s.omega().values()[idx]).abs() < 1e-10 * s.profile().g(0.0));
        }
    }

    #[test]
    fn support_limit() {
        let g = Grid::new(32, 4.0).unwrap();
        assert!(matches!(build_sigma(1.5, g), Err(Error::SupportTooLarge { .. })));
        assert!(build_sigma(1.0, g).is_ok());
    }

    #[test]
    fn decompose_cases() {
        let s = sigma(64, PI, 0.7);
        let g = *s.grid();
        let st = decompose(s.omega(), &s).unwrap();
        assert_eq!(st.m(), 1.0);
        assert!(st.omega_kin().max_abs() < 1e-15);

        let blob = ScalarField::from_fn(g, |x, y| x.sin() * (2.0 * y).cos());
        let st = decompose(&blob, &s).unwrap();
        assert!(st.m().abs() < 1e-15);
        assert!(st.omega_kin().sub(&blob).unwrap().max_abs() < 1e-15);

        let total = s.omega().scaled(2.0).add_scaled(1.0, &blob).unwrap();
        let st = decompose(&total, &s).unwrap();
        assert!((st.m() - 2.0).abs() < 1e-14);
        assert!(st.omega_kin().sub(&blob).unwrap().max_abs() < 1e-13);
        assert!(st.reconstruct(&s).unwrap().sub(&total).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn e_norm_cases() {
        let s = sigma(64, PI, 0.7);
        let g = *s.grid();
        assert_eq!(e_norm(&VorticityState::stationary(1.0, g), &s).unwrap(), 1.0);
        assert_eq!(e_norm(&VorticityState::stationary(0.0, g), &s).unwrap(), 0.0);
        let w = ScalarField::from_fn(g, |x, y| x.sin() * y.sin());
        let st = VorticityState::new(-3.0, w).unwrap();
        let expect = 3.0 + PI / 2f64.sqrt();
        assert!((e_norm(&st, &s).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn grad_sup_norm_regression() {
        let s = sigma(32, 4.0, 1.0);
        assert!((s.grad_sup_norm() - 3.942_868_898_563_387e-1).abs() < 1e-14);
        // Sampled operator norms on a fine grid can only approach the bound from below.
        let fine = sigma(256, 4.0, 1.0);
        let [a, b, c, d] = fine.grad_velocity();
        let sampled = (0..fine.grid().len())
            .map(|i| spectral_norm_2x2(a.values()[i], b.values()[i], c.values()[i], d.values()[i]))
            .fold(0.0, f64::max);
        assert!(sampled <= s.grad_sup_norm() * (1.0 + 1e-12));
        assert!(sampled >= 0.98 * s.grad_sup_norm());
    }

    #[test]
    fn constant_a_laws() {
        let s = sigma(32, 4.0, 1.0);
        assert!((constant_a(1e-12, &s).unwrap() - 1.0).abs() < 1e-10);
        let (a1, a2) = (constant_a(0.3, &s).unwrap(), constant_a(0.6, &s).unwrap());
        assert!((a2 - a1 * a1).abs() < 1e-13 * a2);
        assert_eq!(constant_a(1.0, &s).unwrap(), s.grad_sup_norm().exp());
        assert!(constant_a(0.0, &s).is_err());
    }

    #[test]
    fn gamma_cases() {
        let s = sigma(64, PI, 0.7);
        let g = *s.grid();
        let a = constant_a(1.0, &s).unwrap();
        assert_eq!(gamma(&VorticityState::stationary(0.0, g), &s, 1.0).unwrap(), 1.0);
        assert!((gamma(&VorticityState::stationary(1.0, g), &s, 1.0).unwrap() - a).abs() < 1e-12 * a);
        let w = ScalarField::from_fn(g, |x, y| x.sin() * y.sin());
        let mut prev = 0.0;
        for (m, amp) in [(0.0, 0.5), (0.5, 0.5), (0.5, 1.0), (1.5, 1.0)] {
            let st = VorticityState::new(m, w.scaled(amp)).unwrap();
            let v = gamma(&st, &s, 1.0).unwrap();
            assert!(v > prev);
            prev = v;
        }
    }
}

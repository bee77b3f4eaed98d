use rayon::prelude::*;

use crate::ensemble::{CylindricalFunctional, EnsembleTrajectory};
use crate::error::{Error, Result};
use crate::radial::constant_a;
use crate::reduce::weighted_sum;
use crate::solver::{trapezoid, vorticity_norm, q_label, TestField, Trajectory};
use crate::spectral::{ScalarField, VectorField};

use super::report::{Comparison, VerdictReport};

pub const ENERGY_TOL: f64 = 1e-6;
pub const VORTICITY_EQUALITY_TOL: f64 = 1e-5;
pub const VORTICITY_INEQUALITY_TOL: f64 = 1e-9;

/// Per-member series reduced to `Σ θ_j f_j(t)` at every save time.
fn ensemble_series(rho: &EnsembleTrajectory, per_member: &[Vec<f64>]) -> Vec<f64> {
    (0..rho.times().len())
        .map(|k| {
            let values: Vec<f64> = per_member.iter().map(|s| s[k]).collect();
            weighted_sum(rho.weights(), &values)
        })
        .collect()
}

fn per_member<F>(rho: &EnsembleTrajectory, f: F) -> Result<Vec<Vec<f64>>>
where
    F: Fn(&Trajectory) -> Result<Vec<f64>> + Sync,
{
    rho.members()
        .par_iter()
        .map(&f)
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

/// `∫‖u_kin(t)‖ dρ ≤ ∫ a^{|m|}‖u_{0,kin}‖ dμ₀`.
pub fn verify_energy_inequality(rho: &EnsembleTrajectory) -> Result<VerdictReport> {
    let a = constant_a(rho.config().horizon_t(), rho.sigma())?;
    let kinetic = per_member(rho, |tr| {
        tr.states()
            .iter()
            .map(|s| Ok(s.kinetic_velocity()?.l2_norm()))
            .collect()
    })?;
    let bound: Vec<f64> = rho
        .members()
        .iter()
        .zip(&kinetic)
        .map(|(tr, k)| a.powf(tr.m().abs()) * k[0])
        .collect();
    let lhs = ensemble_series(rho, &kinetic);
    let rhs = vec![weighted_sum(rho.weights(), &bound); lhs.len()];
    Ok(VerdictReport::new(
        "energy_inequality",
        Comparison::AtMost,
        rho.times().to_vec(),
        lhs,
        rhs,
        ENERGY_TOL,
    ))
}

/// Whether the `L^q` vorticity law is an equality: Euler and `q > 1`.
pub fn equality_expected(nu: f64, q: f64) -> bool {
    nu == 0.0 && q > 1.0
}

/// `∫‖ω(t)‖_{L^q} dρ` against `∫‖ω₀‖_{L^q} dμ₀`, as an equality (relative
/// tolerance 1e-5) or as a non-increase (slack 1e-9).
pub fn verify_vorticity_law(rho: &EnsembleTrajectory, q: f64, equality: bool) -> Result<VerdictReport> {
    if !(q >= 1.0) {
        return Err(Error::InvalidExponent(q));
    }
    let sigma = rho.sigma();
    let norms = per_member(rho, |tr| {
        tr.states()
            .iter()
            .map(|s| vorticity_norm(&s.reconstruct(sigma)?, q))
            .collect()
    })?;
    let lhs = ensemble_series(rho, &norms);
    let rhs = vec![lhs[0]; lhs.len()];
    let (comparison, tol, kind) = if equality {
        (Comparison::Equal, VORTICITY_EQUALITY_TOL, "equality")
    } else {
        (Comparison::AtMost, VORTICITY_INEQUALITY_TOL, "inequality")
    };
    Ok(VerdictReport::new(
        format!("vorticity_L{}_{kind}", q_label(q)),
        comparison,
        rho.times().to_vec(),
        lhs,
        rhs,
        tol,
    ))
}

fn index_range(rho_times: &[f64], cfg: &crate::solver::SolverConfig, t_prime: f64, t: f64) -> Result<(usize, usize)> {
    let (i0, i1) = (cfg.save_index(t_prime)?, cfg.save_index(t)?);
    if i0 >= i1 {
        return Err(Error::InvalidArgument(format!(
            "need t' < t, got {} >= {}",
            rho_times[i0], rho_times[i1]
        )));
    }
    Ok((i0, i1))
}

/// `|E_{ρ_t}Φ - E_{ρ_t'}Φ - ∫_{t'}^t E_{ρ_s}[⟨u⊗u, ∇Φ′⟩ + ν Σ_j ∂_jφ ∫u·Δv_j] ds|`
/// with the trapezoidal rule over the save times.
pub fn foias_liouville_residual(
    rho: &EnsembleTrajectory,
    phi: &CylindricalFunctional,
    t_prime: f64,
    t: f64,
) -> Result<f64> {
    let cfg = rho.config();
    let (i0, i1) = index_range(rho.times(), cfg, t_prime, t)?;
    let nu = cfg.nu();
    let sigma = rho.sigma();
    // (Φ, integrand) per member per save index in [i0, i1].
    let per: Vec<Vec<(f64, f64)>> = rho
        .members()
        .par_iter()
        .map(|tr| {
            tr.states()[i0..=i1]
                .iter()
                .map(|s| {
                    let u = s.velocity(sigma)?;
                    let value = phi.eval(&u)?;
                    let mut rate = phi.pairing(&u)?;
                    if nu != 0.0 {
                        rate += nu * phi.viscous_pairing(&u)?;
                    }
                    Ok((value, rate))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<_>>()?;
    let expect = |k: usize, pick: fn(&(f64, f64)) -> f64| {
        let values: Vec<f64> = per.iter().map(|m| pick(&m[k])).collect();
        weighted_sum(rho.weights(), &values)
    };
    let steps = i1 - i0;
    let rates: Vec<f64> = (0..=steps).map(|k| expect(k, |p| p.1)).collect();
    let integral = trapezoid(&rho.times()[i0..=i1], &rates);
    Ok((expect(steps, |p| p.0) - expect(0, |p| p.0) - integral).abs())
}

/// Deterministic route for a single trajectory: the weak formulation tested
/// with `v(s) = Σ_j ∂_jφ(y(s)) v_j`, frozen at each save time, plus the chain
/// rule for `φ(y(t)) - φ(y(t'))`.
pub fn dirac_collapse_residual(
    traj: &Trajectory,
    phi: &CylindricalFunctional,
    t_prime: f64,
    t: f64,
) -> Result<f64> {
    let cfg = traj.config();
    let (i0, i1) = index_range(traj.times(), cfg, t_prime, t)?;
    let sigma = traj.sigma();
    let mut fluxes = Vec::with_capacity(i1 - i0 + 1);
    let mut values = Vec::with_capacity(i1 - i0 + 1);
    for s in &traj.states()[i0..=i1] {
        let u = s.velocity(sigma)?;
        let y = phi.project(&u)?;
        values.push(phi.phi(&y));
        let c = phi.grad_phi(&y);
        let grid = *u.grid();
        let mut v1 = ScalarField::zeros(grid);
        let mut v2 = ScalarField::zeros(grid);
        for (cj, t) in c.iter().zip(phi.tests()) {
            v1 = v1.add_scaled(*cj, &t.field().u1)?;
            v2 = v2.add_scaled(*cj, &t.field().u2)?;
        }
        let frozen = TestField::new(VectorField::new(v1, v2)?);
        fluxes.push(frozen.flux(&u, cfg.nu())?);
    }
    let integral = trapezoid(&traj.times()[i0..=i1], &fluxes);
    Ok((values[values.len() - 1] - values[0] - integral).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{push_forward, test_field_from_streamfunction, DiscreteMeasure, Monomial};
    use crate::radial::{build_sigma, VorticityState};
    use crate::solver::{Scheme, SolverConfig};
    use crate::spectral::Grid;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn setup(nu: f64) -> (Arc<crate::radial::StationaryField>, SolverConfig) {
        let g = Grid::new(32, PI).unwrap();
        let sigma = Arc::new(build_sigma(0.7, g).unwrap());
        let cfg = SolverConfig::uniform(nu, 0.05, 1.0, 10, Scheme::IntegratingFactorRk4)
            .unwrap()
            .with_guard_tol(None);
        (sigma, cfg)
    }

    fn stationary_ensemble() -> EnsembleTrajectory {
        let (sigma, cfg) = setup(0.0);
        let g = *sigma.grid();
        let mu0 = DiscreteMeasure::new(
            vec![0.25, 0.75],
            vec![VorticityState::stationary(1.0, g), VorticityState::stationary(-0.5, g)],
        )
        .unwrap();
        push_forward(&mu0, &sigma, &cfg).unwrap()
    }

    fn shear_ensemble(nu: f64) -> EnsembleTrajectory {
        let (sigma, cfg) = setup(nu);
        let st = VorticityState::new(0.0, ScalarField::from_fn(*sigma.grid(), |_, y| y.sin())).unwrap();
        push_forward(&DiscreteMeasure::dirac(st), &sigma, &cfg).unwrap()
    }

    fn test_field(grid: Grid) -> VectorField {
        let psi = ScalarField::from_fn(grid, |x, y| x.sin() * y.sin() + 0.5 * y.cos());
        test_field_from_streamfunction(&psi).unwrap()
    }

    #[test]
    fn energy_on_stationary_and_shear() {
        let rep = verify_energy_inequality(&stationary_ensemble()).unwrap();
        assert!(rep.pass);
        assert!(rep.lhs.iter().chain(&rep.rhs).all(|&v| v == 0.0));

        let nu = 0.1;
        let rep = verify_energy_inequality(&shear_ensemble(nu)).unwrap();
        assert!(rep.pass);
        for (t, l) in rep.times.iter().zip(&rep.lhs) {
            assert!((l - (-nu * t).exp() * rep.lhs[0]).abs() < 1e-10 * rep.lhs[0]);
        }
    }

    #[test]
    fn vorticity_law_cases() {
        let rep = verify_vorticity_law(&stationary_ensemble(), 2.0, true).unwrap();
        assert!(rep.pass && rep.law_id == "vorticity_L2_equality");
        assert!(rep.lhs.iter().all(|&v| v == rep.lhs[0]));

        let rho = shear_ensemble(0.1);
        assert!(!equality_expected(0.1, 2.0));
        assert!(verify_vorticity_law(&rho, 2.0, false).unwrap().pass);
        assert!(!verify_vorticity_law(&rho, 2.0, true).unwrap().pass);
        assert!(matches!(verify_vorticity_law(&rho, 0.5, false), Err(Error::InvalidExponent(_))));
    }

    fn local_test_field(grid: Grid) -> VectorField {
        let psi = ScalarField::from_fn(grid, |x, y| (-((x - 0.3).powi(2) + y * y) / 0.3).exp());
        test_field_from_streamfunction(&psi).unwrap()
    }

    #[test]
    fn foias_liouville_trivial_cases() {
        let rho = stationary_ensemble();
        let grid = *rho.sigma().grid();
        // Σ is not periodic; a localized test field keeps the box edge out of the quadrature.
        let phi = CylindricalFunctional::first_moment(local_test_field(grid), 100.0).unwrap();
        let scale = rho
            .project_index(0)
            .expect(|s| phi.eval(&s.velocity(rho.sigma()).unwrap()).unwrap())
            .abs()
            .max(1.0);
        assert!(foias_liouville_residual(&rho, &phi, 0.0, 1.0).unwrap() <= 1e-10 * scale);

        let constant = CylindricalFunctional::new(
            vec![test_field(grid)],
            vec![Monomial { coef: 2.0, powers: vec![0] }],
            100.0,
        )
        .unwrap();
        assert_eq!(foias_liouville_residual(&shear_ensemble(0.0), &constant, 0.0, 1.0).unwrap(), 0.0);
        assert!(foias_liouville_residual(&rho, &phi, 0.5, 0.5).is_err());
    }

    #[test]
    fn dirac_collapse_matches_ensemble_route() {
        let rho = shear_ensemble(0.05);
        let grid = *rho.sigma().grid();
        for phi in [
            CylindricalFunctional::first_moment(test_field(grid), 100.0).unwrap(),
            CylindricalFunctional::second_moment(test_field(grid), 100.0).unwrap(),
        ] {
            let a = foias_liouville_residual(&rho, &phi, 0.0, 1.0).unwrap();
            let b = dirac_collapse_residual(&rho.members()[0], &phi, 0.0, 1.0).unwrap();
            assert!((a - b).abs() <= 1e-12, "{a} {b}");
        }
    }
}

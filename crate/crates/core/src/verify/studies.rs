use std::sync::Arc;

use crate::ensemble::{project_measure, push_forward, sliced_w1, DiscreteMeasure, EnsembleTrajectory};
use crate::error::{Error, Result};
use crate::radial::{decompose, StationaryField, VorticityState};
use crate::solver::SolverConfig;
use crate::spectral::{mollify, VectorField};

/// Projected-`W₁` distances `d_ν(t)` between viscous ensembles and the Euler one.
#[derive(Debug, Clone, PartialEq)]
pub struct InviscidTable {
    pub nus: Vec<f64>,
    pub times: Vec<f64>,
    /// `distances[i][k] = d_{nus[i]}(times[k])`.
    pub distances: Vec<Vec<f64>>,
    /// Distances at the last checkpoint strictly decrease along the schedule.
    pub monotone: bool,
    /// Last over first distance at the last checkpoint.
    pub ratio: f64,
}

fn projections_at(
    rho: &EnsembleTrajectory,
    sigma: &StationaryField,
    times: &[f64],
    test_fields: &[VectorField],
) -> Result<Vec<Vec<Vec<f64>>>> {
    times
        .iter()
        .map(|&t| project_measure(&rho.project_time(t)?, sigma, test_fields))
        .collect()
}

fn strictly_decreasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] < w[0])
}

/// Runs `μ₀` through Navier-Stokes for each `ν` in a decreasing schedule and
/// through Euler, and tabulates their projected distances at `checkpoints`.
#[allow(clippy::too_many_arguments)]
pub fn inviscid_limit_study(
    mu0: &DiscreteMeasure<VorticityState>,
    sigma: &Arc<StationaryField>,
    nu_schedule: &[f64],
    cfg: &SolverConfig,
    checkpoints: &[f64],
    test_fields: &[VectorField],
    n_slices: usize,
    slice_seed: u64,
) -> Result<InviscidTable> {
    if nu_schedule.is_empty() || checkpoints.is_empty() {
        return Err(Error::InvalidArgument("empty schedule or checkpoint list".into()));
    }
    if !strictly_decreasing(nu_schedule) || nu_schedule.iter().any(|nu| !(*nu >= 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "nu schedule must be non-negative and strictly decreasing: {nu_schedule:?}"
        )));
    }
    for &t in checkpoints {
        cfg.save_index(t)?;
    }
    let euler = push_forward(mu0, sigma, &cfg.clone().with_nu(0.0)?)?;
    let reference = projections_at(&euler, sigma, checkpoints, test_fields)?;
    drop(euler);
    let weights = mu0.weights();
    let mut distances = Vec::with_capacity(nu_schedule.len());
    for &nu in nu_schedule {
        if nu == 0.0 {
            distances.push(vec![0.0; checkpoints.len()]);
            continue;
        }
        let rho = push_forward(mu0, sigma, &cfg.clone().with_nu(nu)?)?;
        let proj = projections_at(&rho, sigma, checkpoints, test_fields)?;
        let row = proj
            .iter()
            .zip(&reference)
            .map(|(p, r)| sliced_w1(p, weights, r, weights, n_slices, slice_seed))
            .collect::<Result<Vec<_>>>()?;
        distances.push(row);
    }
    let last: Vec<f64> = distances.iter().map(|r| r[r.len() - 1]).collect();
    let ratio = last[last.len() - 1] / last[0];
    Ok(InviscidTable {
        nus: nu_schedule.to_vec(),
        times: checkpoints.to_vec(),
        monotone: strictly_decreasing(&last),
        ratio,
        distances,
    })
}

/// Cauchy gaps of ensembles built from `𝒥^ε`-mollified atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct CauchyTable {
    pub epsilons: Vec<f64>,
    /// `gaps[j] = d(ρ^{ε_j}_T, ρ^{ε_{j+1}}_T)`.
    pub gaps: Vec<f64>,
    /// `gaps[j] / gaps[j+1]`.
    pub ratios: Vec<f64>,
    pub decreasing: bool,
}

/// Mollifies the total vorticity of every atom at radius `eps`.
pub fn mollify_measure(
    mu0: &DiscreteMeasure<VorticityState>,
    sigma: &StationaryField,
    eps: f64,
) -> Result<DiscreteMeasure<VorticityState>> {
    mu0.try_map(|a| decompose(&mollify(&a.reconstruct(sigma)?, eps)?, sigma))
}

#[allow(clippy::too_many_arguments)]
pub fn uniqueness_probe(
    mu0: &DiscreteMeasure<VorticityState>,
    sigma: &Arc<StationaryField>,
    epsilon_schedule: &[f64],
    cfg: &SolverConfig,
    test_fields: &[VectorField],
    n_slices: usize,
    slice_seed: u64,
) -> Result<CauchyTable> {
    if epsilon_schedule.len() < 2 {
        return Err(Error::InvalidArgument("need at least two mollification radii".into()));
    }
    let t = cfg.horizon_t();
    let weights = mu0.weights();
    let mut finals = Vec::with_capacity(epsilon_schedule.len());
    for &eps in epsilon_schedule {
        let mu_eps = mollify_measure(mu0, sigma, eps)?;
        let rho = push_forward(&mu_eps, sigma, cfg)?;
        finals.push(project_measure(&rho.project_time(t)?, sigma, test_fields)?);
    }
    let gaps = finals
        .windows(2)
        .map(|w| sliced_w1(&w[0], weights, &w[1], weights, n_slices, slice_seed))
        .collect::<Result<Vec<_>>>()?;
    let ratios = gaps.windows(2).map(|w| w[0] / w[1]).collect();
    Ok(CauchyTable {
        epsilons: epsilon_schedule.to_vec(),
        decreasing: strictly_decreasing(&gaps),
        gaps,
        ratios,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::test_field_from_streamfunction;
    use crate::radial::build_sigma;
    use crate::solver::Scheme;
    use crate::spectral::{Grid, ScalarField};
    use std::f64::consts::PI;

    #[test]
    fn shear_inviscid_distances_are_closed_form() {
        let g = Grid::new(32, PI).unwrap();
        let sigma = Arc::new(build_sigma(0.7, g).unwrap());
        let cfg = SolverConfig::uniform(0.0, 0.05, 1.0, 4, Scheme::IntegratingFactorRk4)
            .unwrap()
            .with_guard_tol(None);
        let st = VorticityState::new(0.0, ScalarField::from_fn(g, |_, y| y.sin())).unwrap();
        let mu0 = DiscreteMeasure::dirac(st.clone());
        let v = test_field_from_streamfunction(&ScalarField::from_fn(g, |_, y| y.sin())).unwrap();
        let y0 = st.velocity(&sigma).unwrap().inner(&v).unwrap();
        assert!(y0.abs() > 1.0);
        let nus = [0.1, 0.05, 0.0];
        let table = inviscid_limit_study(&mu0, &sigma, &nus, &cfg, &[0.5, 1.0], &[v], 1, 0).unwrap();
        for (i, nu) in nus.iter().enumerate() {
            for (k, t) in table.times.iter().enumerate() {
                let exact = (1.0 - (-nu * t).exp()).abs() * y0.abs();
                assert!((table.distances[i][k] - exact).abs() < 1e-8, "{nu} {t}");
            }
        }
        assert_eq!(table.distances[2], vec![0.0, 0.0]);
        assert!(table.monotone);
        assert!(inviscid_limit_study(&mu0, &sigma, &[0.01, 0.02], &cfg, &[1.0], &[], 1, 0).is_err());
    }

    #[test]
    fn repeated_epsilon_gives_zero_gap() {
        let g = Grid::new(64, PI).unwrap();
        let sigma = Arc::new(build_sigma(0.5, g).unwrap());
        let cfg = SolverConfig::uniform(0.0, 0.05, 0.2, 2, Scheme::IntegratingFactorRk4)
            .unwrap()
            .with_guard_tol(None);
        let blob = ScalarField::from_fn(g, |x, y| {
            (-(x * x + (y - 0.6).powi(2)) / 0.08).exp() - (-(x * x + (y + 0.6).powi(2)) / 0.08).exp()
        });
        let mu0 = DiscreteMeasure::dirac(decompose(&blob, &sigma).unwrap());
        let v = test_field_from_streamfunction(&ScalarField::from_fn(g, |x, y| {
            (-(x * x + (y - 0.6).powi(2)) / 0.5).exp()
        }))
        .unwrap();
        let a = uniqueness_probe(&mu0, &sigma, &[0.4, 0.4, 0.2], &cfg, &[v.clone()], 1, 0).unwrap();
        assert_eq!(a.gaps[0], 0.0);
        assert!(a.gaps[1] > 0.0);
        let b = uniqueness_probe(&mu0, &sigma, &[0.4, 0.4, 0.2], &cfg, &[v], 1, 0).unwrap();
        assert_eq!(a, b);
        assert!(uniqueness_probe(&mu0, &sigma, &[0.4], &cfg, &[], 1, 0).is_err());
    }
}

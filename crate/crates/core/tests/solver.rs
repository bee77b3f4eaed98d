mod common;

use std::f64::consts::PI;

use common::{dipole, fine_sigma, periodic_smooth, sigma_on};
use eustat_core::ensemble::render_profiles;
use eustat_core::radial::{decompose, VorticityState};
use eustat_core::solver::*;
use eustat_core::spectral::{lp_norm, mollify, ScalarField, VectorField};

fn l2_diff(a: &VorticityState, b: &VorticityState) -> f64 {
    lp_norm(&a.omega_kin().sub(b.omega_kin()).unwrap(), 2.0).unwrap()
}

fn orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

#[test]
fn integrating_factor_is_fourth_order() {
    let sigma = sigma_on(64, PI, 0.5);
    let st = VorticityState::new(0.0, periodic_smooth(*sigma.grid())).unwrap();
    for nu in [0.0, 0.01] {
        let finals: Vec<VorticityState> = [0.04, 0.02, 0.01, 0.005]
            .iter()
            .map(|&dt| {
                let cfg = SolverConfig::uniform(nu, dt, 1.0, 1, Scheme::IntegratingFactorRk4)
                    .unwrap()
                    .with_guard_tol(None);
                solve(&st, &sigma, &cfg).unwrap().final_state().clone()
            })
            .collect();
        let errs: Vec<f64> = finals.windows(2).map(|w| l2_diff(&w[0], &w[1])).collect();
        for p in orders(&errs) {
            assert!((p - 4.0).abs() < 0.2, "nu {nu}: orders {:?}", orders(&errs));
        }
    }
}

#[test]
fn splitting_differs_from_step_at_third_order() {
    let sigma = fine_sigma();
    let st = decompose(&render_profiles(*sigma.grid(), &dipole(1.0)), &sigma).unwrap();
    let errs: Vec<f64> = [0.1, 0.05, 0.025]
        .iter()
        .map(|&dt| {
            let cfg = SolverConfig::uniform(0.01, dt, dt, 1, Scheme::IntegratingFactorRk4).unwrap();
            l2_diff(&step(&st, &sigma, &cfg).unwrap(), &viscous_split_step(&st, &sigma, &cfg).unwrap())
        })
        .collect();
    assert!(orders(&errs).iter().all(|&p| p >= 2.7), "{:?}", orders(&errs));
}

#[test]
fn shear_decay_at_every_save_time() {
    let sigma = sigma_on(64, PI, 0.5);
    let g = *sigma.grid();
    let st = VorticityState::new(0.0, ScalarField::from_fn(g, |_, y| y.sin())).unwrap();
    let nu = 0.01;
    for scheme in [Scheme::IntegratingFactorRk4, Scheme::ViscousSplitting] {
        let cfg = SolverConfig::uniform(nu, 0.04, 1.0, 10, scheme).unwrap().with_guard_tol(None);
        let tr = solve(&st, &sigma, &cfg).unwrap();
        for (t, s) in tr.times().iter().zip(tr.states()) {
            let want = st.omega_kin().scaled((-nu * t).exp());
            assert!(s.omega_kin().sub(&want).unwrap().max_abs() <= 1e-10 * want.max_abs());
        }
    }
}

#[test]
fn weak_form_residual_is_second_order_in_save_spacing() {
    let sigma = sigma_on(64, PI, 0.5);
    let g = *sigma.grid();
    let st = VorticityState::new(0.0, periodic_smooth(g)).unwrap();
    let v = VectorField::from_fn(g, |x, y| ((2.0 * y).sin(), x.cos()));
    let res: Vec<f64> = [5, 10, 20]
        .iter()
        .map(|&count| {
            let cfg = SolverConfig::uniform(0.01, 0.01, 1.0, count, Scheme::IntegratingFactorRk4)
                .unwrap()
                .with_guard_tol(None);
            weak_form_residual(&solve(&st, &sigma, &cfg).unwrap(), &v, 0.0, 1.0).unwrap()
        })
        .collect();
    assert!(orders(&res).iter().all(|&p| p >= 2.0 - 0.1), "{res:?} {:?}", orders(&res));
}

#[test]
fn dipole_conserves_enstrophy_and_rearrangement() {
    let sigma = fine_sigma();
    let st = decompose(&render_profiles(*sigma.grid(), &dipole(1.0)), &sigma).unwrap();
    // 100 steps of 0.01.
    let cfg = SolverConfig::uniform(0.0, 0.01, 1.0, 5, Scheme::IntegratingFactorRk4).unwrap();
    let tr = solve(&st, &sigma, &cfg).unwrap();
    let l2: Vec<f64> = tr.states().iter().map(|s| lp_norm(s.omega_kin(), 2.0).unwrap()).collect();
    assert!((l2[5] - l2[0]).abs() <= 1e-8 * l2[0]);
    assert!(tr.states().iter().all(|s| s.m().to_bits() == st.m().to_bits()));

    let opts = AprioriOptions {
        rearrangement_radii: vec![0.5, 1.0, 2.0],
        ..AprioriOptions::default()
    };
    let rep = apriori_report(&tr, &opts).unwrap();
    for check in &rep.rearrangement {
        assert!(check.holds, "r = {}: {:?} vs {}", check.radius, check.series, check.bound);
    }
    assert!(rep.kinetic_l2.iter().all(|&k| k <= rep.kinetic_bound * (1.0 + 1e-6)));
}

#[test]
fn navier_stokes_stays_inside_euler_envelope() {
    let sigma = fine_sigma();
    let raw = render_profiles(*sigma.grid(), &dipole(1.0));
    let st = decompose(&mollify(&raw, 0.2).unwrap(), &sigma).unwrap();
    let cfg = SolverConfig::uniform(0.0, 0.05, 1.0, 10, Scheme::IntegratingFactorRk4).unwrap();
    let euler = solve(&st, &sigma, &cfg).unwrap();
    let ns = solve(&st, &sigma, &cfg.clone().with_nu(1e-4).unwrap()).unwrap();
    let gap = relative_energy_gap(&ns, &euler).unwrap();
    assert_eq!(gap[0].gap, 0.0);
    assert!(gap[10].gap > 0.0);
    for p in &gap {
        assert!(p.gap <= p.envelope, "t = {}: {} > {}", p.time, p.gap, p.envelope);
    }
}

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use eustat_core::ensemble::{
    eval_cylindrical, push_forward, render_profiles, sample_family, test_field_from_streamfunction,
    write_manifest, CylindricalFunctional, DiscreteMeasure, EnsembleTrajectory, FamilyKind,
    InitialFamily, ManifestMember,
};
use eustat_core::radial::{build_sigma, constant_a, decompose, gamma, StationaryField, VorticityState};
use eustat_core::snapshot::write_snapshot;
use eustat_core::solver::{
    apriori_report, solve, AprioriOptions, SolverConfig, Trajectory,
};
use eustat_core::spectral::{mollify, Grid, ScalarField, VectorField};
use eustat_core::verify::{
    equality_expected, foias_liouville_residual, format_float, inviscid_limit_study, uniqueness_probe,
    verdicts_csv, verify_energy_inequality, verify_vorticity_law, Comparison, VerdictReport,
};
use eustat_core::Error;
use sha2::{Digest, Sha256};

use crate::config::{ExperimentConfig, Law, PhiKind, Retention, Weights};
use crate::plot::emit_plot_data;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Ensemble,
    Verify,
    FoiasLiouville,
    InviscidLimit,
    UniquenessProbe,
    Info,
}

/// What a run produced besides its files.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    /// Every verdict the command produced passed (vacuously true without verdicts).
    pub all_pass: bool,
    pub stdout: String,
}

struct Setup {
    grid: Grid,
    sigma: Arc<StationaryField>,
    solver: SolverConfig,
}

fn setup(cfg: &ExperimentConfig) -> eustat_core::Result<Setup> {
    let grid = Grid::new(cfg.grid.n, cfg.grid.box_half_width)?;
    let sigma = Arc::new(build_sigma(cfg.sigma.support_radius, grid)?);
    let s = &cfg.solver;
    let solver = SolverConfig::new(s.nu, s.dt, cfg.sigma.horizon_t, cfg.save_times(), s.scheme)?
        .with_guard_tol(s.boundary_guard_tol);
    Ok(Setup { grid, sigma, solver })
}

fn family(cfg: &ExperimentConfig, grid: Grid) -> InitialFamily {
    let m = &cfg.measure;
    match m.family {
        FamilyKind::FixedAtoms => InitialFamily::fixed_atoms(
            m.class,
            m.profiles.iter().map(|a| render_profiles(grid, a)).collect(),
        ),
        FamilyKind::RandomAmplitudeBlobs => {
            InitialFamily::random_amplitude(m.class, m.profiles[0].clone(), m.amplitude_range)
        }
        FamilyKind::RandomPlacementBlobs => {
            InitialFamily::random_placement(m.class, m.profiles[0].clone(), m.placement_range)
        }
    }
}

fn initial_measure(cfg: &ExperimentConfig, s: &Setup) -> eustat_core::Result<DiscreteMeasure<VorticityState>> {
    let m = &cfg.measure;
    let mu = sample_family(&family(cfg, s.grid), &s.sigma, m.n_atoms, m.master_seed)?;
    match &m.weights {
        Weights::Uniform => Ok(mu),
        Weights::List(w) => DiscreteMeasure::new(w.clone(), mu.atoms().to_vec()),
    }
}

fn test_fields(cfg: &ExperimentConfig, grid: Grid) -> eustat_core::Result<Vec<VectorField>> {
    cfg.verify
        .test_fields
        .iter()
        .map(|t| {
            let (cx, cy, w) = (t.center.0, t.center.1, t.width);
            let psi = ScalarField::from_fn(grid, |x, y| {
                (-((x - cx).powi(2) + (y - cy).powi(2)) / (2.0 * w * w)).exp()
            });
            test_field_from_streamfunction(&psi)
        })
        .collect()
}

fn functional(kind: PhiKind, v: VectorField, radius: f64) -> eustat_core::Result<CylindricalFunctional> {
    match kind {
        PhiKind::FirstMoment => CylindricalFunctional::first_moment(v, radius),
        PhiKind::SecondMoment => CylindricalFunctional::second_moment(v, radius),
    }
}

fn phi_name(kind: PhiKind) -> &'static str {
    match kind {
        PhiKind::FirstMoment => "first_moment",
        PhiKind::SecondMoment => "second_moment",
    }
}

fn kept_indices(retention: Retention, len: usize) -> Vec<usize> {
    match retention {
        Retention::All => (0..len).collect(),
        Retention::Final => vec![len - 1],
        Retention::None => Vec::new(),
    }
}

fn write_trajectory(
    traj: &Trajectory,
    retention: Retention,
    out: &Path,
    prefix: &str,
) -> eustat_core::Result<Vec<(f64, String)>> {
    let nu = traj.config().nu();
    kept_indices(retention, traj.len())
        .into_iter()
        .map(|k| {
            let t = traj.times()[k];
            let name = format!("{prefix}_t{k:03}.eust");
            write_snapshot(&out.join(&name), &traj.states()[k], t, nu)?;
            Ok((t, name))
        })
        .collect()
}

fn write_verdicts(out: &Path, name: &str, reports: &[VerdictReport], stdout: &mut String) -> eustat_core::Result<bool> {
    std::fs::write(out.join(name), verdicts_csv(reports))?;
    for r in reports {
        let _ = writeln!(
            stdout,
            "{} {} margin={} worst_t={}",
            if r.pass { "PASS" } else { "FAIL" },
            r.law_id,
            format_float(r.margin),
            format_float(r.worst_time)
        );
    }
    Ok(reports.iter().all(|r| r.pass))
}

/// Runs `cmd` and writes its artifacts into `out`.
pub fn run(cfg: &ExperimentConfig, cmd: Command, out: &Path) -> eustat_core::Result<Outcome> {
    if cmd != Command::Info {
        std::fs::create_dir_all(out)?;
    }
    let s = setup(cfg)?;
    let mut stdout = String::new();
    let all_pass = match cmd {
        Command::Info => {
            info(cfg, &s, &mut stdout)?;
            true
        }
        Command::Simulate => {
            simulate(cfg, &s, out, &mut stdout)?;
            true
        }
        Command::Ensemble => {
            ensemble(cfg, &s, out, &mut stdout)?;
            true
        }
        Command::Verify => verify(cfg, &s, out, &mut stdout)?,
        Command::FoiasLiouville => foias_liouville(cfg, &s, out, &mut stdout)?,
        Command::InviscidLimit => inviscid(cfg, &s, out, &mut stdout)?,
        Command::UniquenessProbe => uniqueness(cfg, &s, out, &mut stdout)?,
    };
    Ok(Outcome { all_pass, stdout })
}

fn info(cfg: &ExperimentConfig, s: &Setup, stdout: &mut String) -> eustat_core::Result<()> {
    stdout.push_str(&cfg.render());
    let t = cfg.sigma.horizon_t;
    let mu = initial_measure(cfg, s)?;
    let gammas: Vec<f64> = mu
        .atoms()
        .iter()
        .map(|a| gamma(a, &s.sigma, t))
        .collect::<eustat_core::Result<_>>()?;
    let min = gammas.iter().copied().fold(f64::INFINITY, f64::min);
    let max = gammas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let _ = writeln!(stdout, "\n# derived");
    let _ = writeln!(stdout, "# a = {}", format_float(constant_a(t, &s.sigma)?));
    let _ = writeln!(stdout, "# grad_sigma_sup = {}", format_float(s.sigma.grad_sup_norm()));
    let _ = writeln!(stdout, "# sigma_discrete_mass = {}", format_float(s.sigma.discrete_mass()));
    let _ = writeln!(
        stdout,
        "# gamma min/mean/max = {} {} {}",
        format_float(min),
        format_float(eustat_core::reduce::weighted_sum(mu.weights(), &gammas)),
        format_float(max)
    );
    Ok(())
}

/// A single trajectory from the first configured atom at unit amplitude.
/// Class checks are skipped so that periodic data such as a shear can run.
fn simulate(cfg: &ExperimentConfig, s: &Setup, out: &Path, stdout: &mut String) -> eustat_core::Result<()> {
    let mut omega = render_profiles(s.grid, &cfg.measure.profiles[0]);
    if let Some(eps) = cfg.measure.class.mollification() {
        omega = mollify(&omega, eps)?;
    }
    let state0 = decompose(&omega, &s.sigma)?;
    let traj = solve(&state0, &s.sigma, &s.solver)?;
    let opts = AprioriOptions {
        q_values: cfg.verify.q.clone(),
        ..AprioriOptions::default()
    };
    let report = apriori_report(&traj, &opts)?;
    emit_plot_data(&report.series(), &out.join("apriori.csv"))?;
    let snaps = write_trajectory(&traj, cfg.io.snapshot_retention, out, "trajectory")?;
    let _ = writeln!(stdout, "m = {}", format_float(traj.m()));
    let _ = writeln!(stdout, "snapshots = {}", snaps.len());
    Ok(())
}

fn ensemble(cfg: &ExperimentConfig, s: &Setup, out: &Path, stdout: &mut String) -> eustat_core::Result<()> {
    let mu0 = initial_measure(cfg, s)?;
    let rho = push_forward(&mu0, &s.sigma, &s.solver)?;
    let m = &cfg.measure;
    let members = rho
        .members()
        .iter()
        .enumerate()
        .map(|(j, tr)| {
            Ok(ManifestMember {
                weight: rho.weights()[j],
                seed: eustat_core::ensemble::atom_seed(m.master_seed, j),
                snapshots: write_trajectory(tr, cfg.io.snapshot_retention, out, &format!("member{j:03}"))?,
            })
        })
        .collect::<eustat_core::Result<Vec<_>>>()?;
    let manifest = write_manifest(m.family, m.class, m.master_seed, &members);
    std::fs::write(out.join("manifest.txt"), &manifest)?;
    let _ = writeln!(stdout, "members = {}", members.len());
    let _ = writeln!(stdout, "manifest_sha256 = {:x}", Sha256::digest(manifest.as_bytes()));
    Ok(())
}

fn functionals(cfg: &ExperimentConfig, s: &Setup) -> eustat_core::Result<Vec<(PhiKind, CylindricalFunctional)>> {
    let v = test_fields(cfg, s.grid)?.swap_remove(0);
    cfg.verify
        .phi
        .iter()
        .map(|&k| Ok((k, functional(k, v.clone(), cfg.verify.cutoff_radius)?)))
        .collect()
}

fn expectation_at_end(rho: &EnsembleTrajectory, phi: &CylindricalFunctional) -> eustat_core::Result<f64> {
    let sigma = rho.sigma();
    let values = rho
        .members()
        .iter()
        .map(|m| eval_cylindrical(phi, m.final_state(), sigma))
        .collect::<eustat_core::Result<Vec<f64>>>()?;
    Ok(eustat_core::reduce::weighted_sum(rho.weights(), &values))
}

fn verify(cfg: &ExperimentConfig, s: &Setup, out: &Path, stdout: &mut String) -> eustat_core::Result<bool> {
    let mu0 = initial_measure(cfg, s)?;
    let rho = push_forward(&mu0, &s.sigma, &s.solver)?;
    let t = cfg.sigma.horizon_t;
    let mut reports = Vec::new();
    for law in &cfg.verify.laws {
        match law {
            Law::Energy => reports.push(verify_energy_inequality(&rho)?),
            Law::Vorticity => {
                for &q in &cfg.verify.q {
                    reports.push(verify_vorticity_law(&rho, q, equality_expected(cfg.solver.nu, q))?);
                }
            }
            Law::FoiasLiouville => {
                for (kind, phi) in functionals(cfg, s)? {
                    let residual = foias_liouville_residual(&rho, &phi, 0.0, t)?;
                    let scale = expectation_at_end(&rho, &phi)?.abs();
                    reports.push(VerdictReport::new(
                        format!("foias_liouville_{}", phi_name(kind)),
                        Comparison::AtMost,
                        vec![t],
                        vec![residual],
                        vec![cfg.verify.fl_tolerance * scale],
                        0.0,
                    ));
                }
            }
        }
    }
    write_verdicts(out, "verdicts.csv", &reports, stdout)
}

/// Restricts every member to every `stride`-th save time.
fn subsample(rho: &EnsembleTrajectory, stride: usize) -> eustat_core::Result<EnsembleTrajectory> {
    let len = rho.times().len();
    if (len - 1) % stride != 0 {
        return Err(Error::InvalidArgument(format!(
            "stride {stride} does not divide {} save intervals",
            len - 1
        )));
    }
    let cfg = rho.config();
    let times: Vec<f64> = rho.times().iter().copied().step_by(stride).collect();
    let sub_cfg = SolverConfig::new(cfg.nu(), cfg.dt(), cfg.horizon_t(), times, cfg.scheme())?
        .with_guard_tol(cfg.boundary_guard_tol());
    let members = rho
        .members()
        .iter()
        .map(|m| {
            let states = m.states().iter().step_by(stride).cloned().collect();
            Trajectory::from_snapshots(sub_cfg.clone(), rho.sigma().clone(), states)
        })
        .collect::<eustat_core::Result<Vec<_>>>()?;
    EnsembleTrajectory::new(rho.weights().to_vec(), members)
}

fn foias_liouville(cfg: &ExperimentConfig, s: &Setup, out: &Path, stdout: &mut String) -> eustat_core::Result<bool> {
    let mu0 = initial_measure(cfg, s)?;
    let rho = push_forward(&mu0, &s.sigma, &s.solver)?;
    let t = cfg.sigma.horizon_t;
    let f = &cfg.verify;
    let mut table = String::from("phi,stride,spacing,residual,expectation\n");
    let mut reports = Vec::new();
    for (kind, phi) in functionals(cfg, s)? {
        let name = phi_name(kind);
        let scale = expectation_at_end(&rho, &phi)?;
        let mut rows = Vec::new();
        for &stride in &f.fl_strides {
            let sub = subsample(&rho, stride)?;
            let spacing = sub.times()[1] - sub.times()[0];
            let residual = foias_liouville_residual(&sub, &phi, 0.0, t)?;
            let _ = writeln!(
                table,
                "{name},{stride},{},{},{}",
                format_float(spacing),
                format_float(residual),
                format_float(scale)
            );
            rows.push((spacing, residual));
        }
        if rows.len() > 1 {
            let (times, ratios): (Vec<f64>, Vec<f64>) =
                rows.windows(2).map(|w| (w[1].0, w[0].1 / w[1].1)).unzip();
            let n = ratios.len();
            reports.push(VerdictReport::new(
                format!("foias_liouville_order_{name}"),
                Comparison::AtMost,
                times,
                vec![f.fl_order_factor; n],
                ratios,
                0.0,
            ));
        }
        let (spacing, residual) = rows[rows.len() - 1];
        reports.push(VerdictReport::new(
            format!("foias_liouville_{name}"),
            Comparison::AtMost,
            vec![spacing],
            vec![residual],
            vec![f.fl_tolerance * scale.abs()],
            0.0,
        ));
    }
    std::fs::write(out.join("foias_liouville.csv"), table)?;
    write_verdicts(out, "verdicts.csv", &reports, stdout)
}

fn inviscid(cfg: &ExperimentConfig, s: &Setup, out: &Path, stdout: &mut String) -> eustat_core::Result<bool> {
    let mu0 = initial_measure(cfg, s)?;
    let f = &cfg.verify;
    let tests = test_fields(cfg, s.grid)?;
    let table = inviscid_limit_study(
        &mu0,
        &s.sigma,
        &f.nu_schedule,
        &s.solver,
        &f.checkpoints,
        &tests,
        f.n_slices,
        f.slice_seed,
    )?;
    let mut csv = String::from("nu,t,distance\n");
    for (nu, row) in table.nus.iter().zip(&table.distances) {
        for (t, d) in table.times.iter().zip(row) {
            let _ = writeln!(csv, "{},{},{}", format_float(*nu), format_float(*t), format_float(*d));
        }
    }
    std::fs::write(out.join("inviscid_limit.csv"), csv)?;
    let last: Vec<f64> = table.distances.iter().map(|r| r[r.len() - 1]).collect();
    let mut reports = Vec::new();
    if last.len() > 1 {
        let n = last.len() - 1;
        // Strict decrease: ties count as failures through the negative zero margin.
        let mut r = VerdictReport::new(
            "inviscid_monotone",
            Comparison::AtMost,
            table.nus[1..].to_vec(),
            last[1..].to_vec(),
            last[..n].to_vec(),
            0.0,
        );
        r.pass &= table.monotone;
        reports.push(r);
    }
    reports.push(VerdictReport::new(
        "inviscid_ratio",
        Comparison::AtMost,
        vec![table.times[table.times.len() - 1]],
        vec![table.ratio],
        vec![f.inviscid_ratio_max],
        0.0,
    ));
    write_verdicts(out, "verdicts.csv", &reports, stdout)
}

fn uniqueness(cfg: &ExperimentConfig, s: &Setup, out: &Path, stdout: &mut String) -> eustat_core::Result<bool> {
    let mu0 = initial_measure(cfg, s)?;
    let f = &cfg.verify;
    let tests = test_fields(cfg, s.grid)?;
    let table = uniqueness_probe(&mu0, &s.sigma, &f.epsilon_schedule, &s.solver, &tests, f.n_slices, f.slice_seed)?;
    let mut csv = String::from("epsilon,epsilon_next,gap\n");
    for (j, g) in table.gaps.iter().enumerate() {
        let _ = writeln!(
            csv,
            "{},{},{}",
            format_float(table.epsilons[j]),
            format_float(table.epsilons[j + 1]),
            format_float(*g)
        );
    }
    std::fs::write(out.join("uniqueness_probe.csv"), csv)?;
    let mut reports = Vec::new();
    if !table.ratios.is_empty() {
        let n = table.ratios.len();
        reports.push(VerdictReport::new(
            "cauchy_ratio",
            Comparison::AtMost,
            table.epsilons[1..=n].to_vec(),
            vec![f.cauchy_factor; n],
            table.ratios.clone(),
            0.0,
        ));
    }
    write_verdicts(out, "verdicts.csv", &reports, stdout)
}

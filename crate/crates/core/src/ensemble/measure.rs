use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::radial::{StationaryField, VorticityState};
use crate::reduce::{pairwise_sum, weighted_sum};
use crate::solver::{solve, SolverConfig, Trajectory};

/// Allowed deviation of `Σθ_j` from 1.
pub const WEIGHT_TOL: f64 = 1e-12;

/// Weighted Dirac mixture `Σ θ_j δ_{a_j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure<A> {
    weights: Vec<f64>,
    atoms: Vec<A>,
}

fn check_weights(weights: &[f64], atoms: usize) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::BadWeights("empty measure".into()));
    }
    if weights.len() != atoms {
        return Err(Error::BadWeights(format!(
            "{} weights for {} atoms",
            weights.len(),
            atoms
        )));
    }
    if let Some((j, w)) = weights.iter().enumerate().find(|(_, w)| !(**w > 0.0) || !w.is_finite()) {
        return Err(Error::BadWeights(format!("weight {j} = {w} is not positive")));
    }
    let total = pairwise_sum(weights);
    if (total - 1.0).abs() > WEIGHT_TOL {
        return Err(Error::BadWeights(format!("weights sum to {total}")));
    }
    Ok(())
}

impl<A> DiscreteMeasure<A> {
    pub fn new(weights: Vec<f64>, atoms: Vec<A>) -> Result<Self> {
        check_weights(&weights, atoms.len())?;
        Ok(Self { weights, atoms })
    }

    /// Equal weights `1/n`.
    pub fn uniform(atoms: Vec<A>) -> Result<Self> {
        let n = atoms.len();
        Self::new(vec![1.0 / n as f64; n], atoms)
    }

    pub fn dirac(atom: A) -> Self {
        Self {
            weights: vec![1.0],
            atoms: vec![atom],
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn atoms(&self) -> &[A] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `∫ f dμ` with a fixed-order reduction.
    pub fn expect(&self, f: impl Fn(&A) -> f64) -> f64 {
        let values: Vec<f64> = self.atoms.iter().map(f).collect();
        weighted_sum(&self.weights, &values)
    }

    /// Same weights, atoms mapped through `f`.
    pub fn map<B>(&self, f: impl Fn(&A) -> B) -> DiscreteMeasure<B> {
        DiscreteMeasure {
            weights: self.weights.clone(),
            atoms: self.atoms.iter().map(f).collect(),
        }
    }

    pub fn try_map<B>(&self, f: impl Fn(&A) -> Result<B>) -> Result<DiscreteMeasure<B>> {
        Ok(DiscreteMeasure {
            weights: self.weights.clone(),
            atoms: self.atoms.iter().map(f).collect::<Result<_>>()?,
        })
    }
}

/// Validated measure on states; all atoms must share a grid.
pub fn dirac_mixture(weights: Vec<f64>, atoms: Vec<VorticityState>) -> Result<DiscreteMeasure<VorticityState>> {
    let measure = DiscreteMeasure::new(weights, atoms)?;
    let grid = *measure.atoms[0].grid();
    for a in &measure.atoms[1..] {
        grid.same_as(a.grid())?;
    }
    Ok(measure)
}

/// Member trajectories of a push-forward ensemble `ρ = Sμ₀`.
#[derive(Debug, Clone)]
pub struct EnsembleTrajectory {
    weights: Vec<f64>,
    members: Vec<Trajectory>,
    config: SolverConfig,
}

impl EnsembleTrajectory {
    /// Assembles an ensemble from already solved members sharing one configuration.
    pub fn new(weights: Vec<f64>, members: Vec<Trajectory>) -> Result<Self> {
        check_weights(&weights, members.len())?;
        let config = members[0].config().clone();
        for m in &members[1..] {
            if m.config() != &config {
                return Err(Error::InvalidArgument("members use different solver configs".into()));
            }
            members[0].initial().grid().same_as(m.initial().grid())?;
        }
        Ok(Self {
            weights,
            members,
            config,
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn members(&self) -> &[Trajectory] {
        &self.members
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn times(&self) -> &[f64] {
        self.config.save_times()
    }

    pub fn sigma(&self) -> &Arc<StationaryField> {
        self.members[0].sigma()
    }

    /// `Σ θ_j f(member_j)` with the fixed reduction order.
    pub fn expect(&self, f: impl Fn(&Trajectory) -> f64) -> f64 {
        let values: Vec<f64> = self.members.iter().map(f).collect();
        weighted_sum(&self.weights, &values)
    }

    /// `Π_t ρ`: same weights, atoms are the member states at `t`.
    pub fn project_time(&self, t: f64) -> Result<DiscreteMeasure<VorticityState>> {
        let k = self.config.save_index(t)?;
        Ok(self.project_index(k))
    }

    pub fn project_index(&self, k: usize) -> DiscreteMeasure<VorticityState> {
        DiscreteMeasure {
            weights: self.weights.clone(),
            atoms: self.members.iter().map(|m| m.states()[k].clone()).collect(),
        }
    }

    /// The single-member ensemble `δ_{S(u_j)}`.
    pub fn member_dirac(&self, j: usize) -> EnsembleTrajectory {
        EnsembleTrajectory {
            weights: vec![1.0],
            members: vec![self.members[j].clone()],
            config: self.config.clone(),
        }
    }
}

/// Solves every atom in parallel; member order and weights are preserved and
/// a failing member is reported with its index.
pub fn push_forward(
    mu0: &DiscreteMeasure<VorticityState>,
    sigma: &Arc<StationaryField>,
    cfg: &SolverConfig,
) -> Result<EnsembleTrajectory> {
    let members = mu0
        .atoms()
        .par_iter()
        .enumerate()
        .map(|(index, atom)| {
            solve(atom, sigma, cfg).map_err(|e| Error::Member {
                index,
                source: Box::new(e),
            })
        })
        .collect::<Vec<Result<Trajectory>>>()
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(EnsembleTrajectory {
        weights: mu0.weights().to_vec(),
        members,
        config: cfg.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Grid, ScalarField};

    fn atom(grid: Grid, a: f64) -> VorticityState {
        VorticityState::new(0.0, ScalarField::from_fn(grid, |x, _| a * (x * 0.5).sin())).unwrap()
    }

    #[test]
    fn weight_validation() {
        let g = Grid::new(16, 2.0 * std::f64::consts::PI).unwrap();
        assert!(dirac_mixture(vec![1.0], vec![atom(g, 1.0)]).is_ok());
        assert!(dirac_mixture(vec![0.5, 0.5], vec![atom(g, 1.0), atom(g, 2.0)]).is_ok());
        for w in [vec![0.3, 0.3], vec![1.5, -0.5], vec![1.0, 0.0]] {
            assert!(matches!(
                dirac_mixture(w, vec![atom(g, 1.0), atom(g, 2.0)]),
                Err(Error::BadWeights(_))
            ));
        }
        let other = Grid::new(32, 2.0 * std::f64::consts::PI).unwrap();
        assert!(matches!(
            dirac_mixture(vec![0.5, 0.5], vec![atom(g, 1.0), atom(other, 1.0)]),
            Err(Error::GridMismatch(_))
        ));
    }

    #[test]
    fn uniform_weights_sum_to_one() {
        for n in [1, 3, 7, 1000, 4096] {
            let m = DiscreteMeasure::uniform(vec![0u8; n]).unwrap();
            assert!((pairwise_sum(m.weights()) - 1.0).abs() <= WEIGHT_TOL);
        }
    }

    #[test]
    fn expectation_is_linear_and_monotone() {
        let m = DiscreteMeasure::new(vec![0.25, 0.75], vec![2.0, 4.0]).unwrap();
        assert_eq!(m.expect(|x| *x), 3.5);
        assert!(m.expect(|x| x * x) >= 0.0);
        assert_eq!(m.expect(|x| 2.0 * x + 1.0), 2.0 * m.expect(|x| *x) + 1.0);
    }

    fn shear_setup() -> (Arc<crate::radial::StationaryField>, SolverConfig) {
        use crate::solver::Scheme;
        let g = Grid::new(32, std::f64::consts::PI).unwrap();
        let sigma = Arc::new(crate::radial::build_sigma(0.5, g).unwrap());
        let cfg = SolverConfig::uniform(0.02, 0.05, 0.5, 5, Scheme::IntegratingFactorRk4)
            .unwrap()
            .with_guard_tol(None);
        (sigma, cfg)
    }

    fn shear_atom(grid: Grid, a: f64) -> VorticityState {
        VorticityState::new(0.0, ScalarField::from_fn(grid, |_, y| a * y.sin())).unwrap()
    }

    #[test]
    fn push_forward_of_diracs() {
        let (sigma, cfg) = shear_setup();
        let g = *sigma.grid();
        let (a, b) = (shear_atom(g, 1.0), shear_atom(g, -0.5));
        let one = push_forward(&DiscreteMeasure::dirac(a.clone()), &sigma, &cfg).unwrap();
        let direct = solve(&a, &sigma, &cfg).unwrap();
        assert_eq!(one.weights(), &[1.0]);
        assert_eq!(one.members()[0].final_state(), direct.final_state());

        let mu0 = dirac_mixture(vec![0.5, 0.5], vec![a.clone(), b.clone()]).unwrap();
        let rho = push_forward(&mu0, &sigma, &cfg).unwrap();
        assert_eq!(rho.members()[1].final_state(), solve(&b, &sigma, &cfg).unwrap().final_state());
        let pi0 = rho.project_time(0.0).unwrap();
        assert_eq!(pi0.atoms(), mu0.atoms());
        assert_eq!(pi0.weights(), mu0.weights());
        let last = rho.project_time(0.5).unwrap();
        assert_eq!(last.weights(), mu0.weights());
        assert_eq!(&last.atoms()[0], direct.final_state());
        assert!(matches!(rho.project_time(0.25), Err(Error::TimeNotSaved(_))));
        assert_eq!(rho.member_dirac(1).members()[0].final_state(), rho.members()[1].final_state());
    }

    #[test]
    fn failing_member_carries_its_index() {
        let (sigma, cfg) = shear_setup();
        let g = *sigma.grid();
        let mu0 = DiscreteMeasure::uniform(vec![shear_atom(g, 1.0), shear_atom(g, 100.0)]).unwrap();
        match push_forward(&mu0, &sigma, &cfg) {
            Err(Error::Member { index, source }) => {
                assert_eq!(index, 1);
                assert!(matches!(*source, Error::CflViolation { .. }));
            }
            other => panic!("{other:?}"),
        }
    }
}

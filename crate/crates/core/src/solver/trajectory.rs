use std::sync::Arc;

use crate::error::{Error, Result};
use crate::radial::{StationaryField, VorticityState};

use super::config::SolverConfig;

/// Saved states of one solution on `[0, T]`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    config: SolverConfig,
    sigma: Arc<StationaryField>,
    times: Vec<f64>,
    states: Vec<VorticityState>,
}

impl Trajectory {
    pub(crate) fn from_parts(
        config: SolverConfig,
        sigma: Arc<StationaryField>,
        times: Vec<f64>,
        states: Vec<VorticityState>,
    ) -> Self {
        Self {
            config,
            sigma,
            times,
            states,
        }
    }

    /// Reassembles a trajectory from stored snapshots (one per save time).
    pub fn from_snapshots(
        config: SolverConfig,
        sigma: Arc<StationaryField>,
        states: Vec<VorticityState>,
    ) -> Result<Self> {
        if states.len() != config.save_times().len() {
            return Err(Error::InvalidArgument(format!(
                "{} states for {} save times",
                states.len(),
                config.save_times().len()
            )));
        }
        let m = states[0].m();
        for s in &states {
            sigma.grid().same_as(s.grid())?;
            if s.m().to_bits() != m.to_bits() {
                return Err(Error::InvalidArgument("m differs between snapshots".into()));
            }
        }
        let times = config.save_times().to_vec();
        Ok(Self::from_parts(config, sigma, times, states))
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn sigma(&self) -> &Arc<StationaryField> {
        &self.sigma
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[VorticityState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn initial(&self) -> &VorticityState {
        &self.states[0]
    }

    pub fn final_state(&self) -> &VorticityState {
        self.states.last().expect("trajectory has at least one state")
    }

    pub fn state_at(&self, t: f64) -> Result<&VorticityState> {
        Ok(&self.states[self.config.save_index(t)?])
    }

    pub fn m(&self) -> f64 {
        self.states[0].m()
    }
}

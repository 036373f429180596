//! RMSprop.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::{MlpParams, ParamGrads};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RmsPropConfig {
    pub lr: f64,
    pub rho: f64,
    pub eps: f64,
}

impl Default for RmsPropConfig {
    fn default() -> Self {
        RmsPropConfig {
            lr: 5e-5,
            rho: 0.9,
            eps: 1e-8,
        }
    }
}

impl RmsPropConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return Err(Error::invalid(format!("learning rate must be > 0, got {}", self.lr)));
        }
        if !(0.0..1.0).contains(&self.rho) {
            return Err(Error::invalid(format!("rho must lie in [0, 1), got {}", self.rho)));
        }
        if !(self.eps > 0.0) {
            return Err(Error::invalid(format!("eps must be > 0, got {}", self.eps)));
        }
        Ok(())
    }
}

/// Running average of squared gradients, one entry per parameter in canonical
/// order.
#[derive(Clone, Debug, PartialEq)]
pub struct RmsPropState {
    pub config: RmsPropConfig,
    accum: Vec<f64>,
}

impl RmsPropState {
    pub fn new(config: RmsPropConfig, params: &MlpParams) -> Self {
        RmsPropState {
            config,
            accum: vec![0.0; params.num_params()],
        }
    }

    pub fn from_accumulator(config: RmsPropConfig, accum: Vec<f64>) -> Result<Self> {
        if accum.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::invalid("RMSprop accumulator entries must be finite and >= 0"));
        }
        Ok(RmsPropState { config, accum })
    }

    pub fn accumulator(&self) -> &[f64] {
        &self.accum
    }

    /// One update: `v ← ρv + (1−ρ)g²`, `θ ← θ − η·g/(√v + ε)`.
    ///
    /// A gradient with any non-finite entry is rejected before anything is
    /// modified.
    pub fn step(&mut self, params: &mut MlpParams, grads: &ParamGrads) -> Result<()> {
        if grads.len() != params.num_params() || self.accum.len() != params.num_params() {
            return Err(Error::shape(
                "rmsprop_step",
                format!("{} parameters", params.num_params()),
                format!("{} gradients, {} accumulators", grads.len(), self.accum.len()),
            ));
        }
        if let Some(i) = grads.values().position(|g| !g.is_finite()) {
            return Err(Error::NonFinite(format!("gradient entry {i}; RMSprop step rejected")));
        }
        let RmsPropConfig { lr, rho, eps } = self.config;
        for ((theta, &g), v) in params.values_mut().zip(grads.values()).zip(self.accum.iter_mut()) {
            *v = rho * *v + (1.0 - rho) * g * g;
            *theta -= lr * g / (v.sqrt() + eps);
        }
        Ok(())
    }
}

/// Functional form of [`RmsPropState::step`].
pub fn rmsprop_step(
    params: &MlpParams,
    grads: &ParamGrads,
    state: &RmsPropState,
) -> Result<(MlpParams, RmsPropState)> {
    let mut params = params.clone();
    let mut state = state.clone();
    state.step(&mut params, grads)?;
    Ok((params, state))
}

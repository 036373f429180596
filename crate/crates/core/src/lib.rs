//! Core of `wganlab`: a small laboratory for Wasserstein GANs on 2-D toy data.
//!
//! The crate provides dense numerics, a Leaky-ReLU MLP with input gradients and
//! penalty double-backprop, the Lipschitz regularizers (weight clipping,
//! gradient penalty, one-sided Lipschitz penalty, difference-quotient penalty),
//! RMSprop, toy datasets, the WGAN training loop, and optimal-transport
//! oracles used to check the theory behind them.

pub mod data;
pub mod error;
pub mod lipschitz;
pub mod nn;
pub mod numerics;
pub mod optim;
pub mod regularizers;
pub mod training;
pub mod transport;

pub use error::{Error, Result};
pub use numerics::{Matrix, RngState};

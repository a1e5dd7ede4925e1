//! Hourly solar radiation forecasting.
//!
//! The pipeline reads a weather log ([`dataio`]), encodes each row into
//! eight standardized features, and fits a ReLU multilayer perceptron
//! ([`network`]) with Adam and learning-rate decay ([`optim`]) under early
//! stopping ([`train`]). Two moving-average predictors ([`baselines`])
//! provide reference forecasts, and [`cli`] wires everything into the
//! `solrad` binary.

pub mod baselines;
pub mod cli;
pub mod dataio;
pub mod error;
pub mod network;
pub mod optim;
pub mod train;

pub use error::{Error, Result};

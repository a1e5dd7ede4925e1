//! Adam with bias-corrected moments and per-epoch time-based learning-rate decay.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{Gradients, NetworkParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamHyper {
    pub alpha0: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    /// Per-epoch decay coefficient, see [`decayed_lr`].
    pub decay: f64,
}

impl Default for AdamHyper {
    fn default() -> Self {
        AdamHyper {
            alpha0: 0.001,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            decay: 0.01,
        }
    }
}

impl AdamHyper {
    pub fn validate(&self) -> Result<()> {
        let unit = |b: f64| (0.0..1.0).contains(&b);
        if !(self.alpha0 > 0.0 && self.alpha0.is_finite()) {
            return Err(Error::Config(format!(
                "learning rate must be > 0, got {}",
                self.alpha0
            )));
        }
        if !unit(self.beta1) || !unit(self.beta2) {
            return Err(Error::Config("beta1 and beta2 must lie in [0, 1)".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::Config("epsilon must be > 0".into()));
        }
        if !(self.decay >= 0.0 && self.decay.is_finite()) {
            return Err(Error::Config(format!(
                "decay must be >= 0, got {}",
                self.decay
            )));
        }
        Ok(())
    }
}

/// `alpha0 / (1 + decay · epoch)`.
pub fn decayed_lr(hyper: &AdamHyper, epoch: usize) -> f64 {
    hyper.alpha0 / (1.0 + hyper.decay * epoch as f64)
}

/// First and second moment estimates, shaped like the parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: NetworkParams,
    pub v: NetworkParams,
    pub t: u64,
}

impl AdamState {
    pub fn new(params: &NetworkParams) -> AdamState {
        AdamState {
            m: params.zeros_like(),
            v: params.zeros_like(),
            t: 0,
        }
    }

    /// One Adam update of `params` in place.
    ///
    /// Gradients are checked before anything is touched, so a rejected step
    /// leaves both the parameters and the state unchanged.
    pub fn step(
        &mut self,
        params: &mut NetworkParams,
        grads: &Gradients,
        hyper: &AdamHyper,
        lr: f64,
    ) -> Result<()> {
        if !params.same_shape(grads) || !params.same_shape(&self.m) || !params.same_shape(&self.v) {
            return Err(Error::Shape(
                "parameters, gradients and optimizer state differ in shape".into(),
            ));
        }
        if let Some(g) = grads.values().find(|g| !g.is_finite()) {
            return Err(Error::NumericInput(format!("gradient coordinate is {g}")));
        }

        self.t += 1;
        let t = self.t as i32;
        let (b1, b2) = (hyper.beta1, hyper.beta2);
        let correction1 = 1.0 - b1.powi(t);
        let correction2 = 1.0 - b2.powi(t);

        for (((w, g), m), v) in params
            .values_mut()
            .zip(grads.values())
            .zip(self.m.values_mut())
            .zip(self.v.values_mut())
        {
            *m = b1 * *m + (1.0 - b1) * g;
            *v = b2 * *v + (1.0 - b2) * g * g;
            let m_hat = *m / correction1;
            let v_hat = *v / correction2;
            *w -= lr * m_hat / (v_hat.sqrt() + hyper.epsilon);
        }
        Ok(())
    }
}

/// Functional form of [`AdamState::step`].
pub fn adam_step(
    params: &NetworkParams,
    grads: &Gradients,
    state: &AdamState,
    hyper: &AdamHyper,
    lr: f64,
) -> Result<(NetworkParams, AdamState)> {
    let mut params = params.clone();
    let mut state = state.clone();
    state.step(&mut params, grads, hyper, lr)?;
    Ok((params, state))
}

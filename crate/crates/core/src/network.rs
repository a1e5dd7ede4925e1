//! Dense feed-forward regression network with analytic backpropagation.
//!
//! Weights are stored row-major as `units × fan_in`, so row `i` holds the
//! incoming weights of unit `i`. All arithmetic is `f64` and every reduction
//! runs in a fixed order, which makes forward and backward passes bitwise
//! reproducible.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Linear,
}

impl Activation {
    fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Relu => relu(x),
            Activation::Linear => x,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub units: usize,
    pub activation: Activation,
    /// Ridge penalty covers this layer's weights and biases.
    pub regularized: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub input_dim: usize,
    pub layers: Vec<LayerSpec>,
    pub lambda: f64,
}

/// Hidden widths of the reference stack; a single linear unit follows.
pub const DEFAULT_HIDDEN: [usize; 9] = [10, 20, 20, 20, 20, 20, 15, 15, 15];
pub const DEFAULT_LAMBDA: f64 = 0.009;

/// 8 inputs, nine ReLU layers, a linear output, ridge 0.009 on the last two layers.
impl Default for NetworkConfig {
    fn default() -> NetworkConfig {
        NetworkConfig::from_hidden(crate::dataio::FEATURE_DIM, &DEFAULT_HIDDEN, DEFAULT_LAMBDA)
    }
}

impl NetworkConfig {
    /// ReLU hidden layers of the given widths followed by one linear output
    /// unit. The ridge penalty is attached to the final two layers.
    pub fn from_hidden(input_dim: usize, hidden: &[usize], lambda: f64) -> NetworkConfig {
        let mut layers: Vec<LayerSpec> = hidden
            .iter()
            .map(|&units| LayerSpec {
                units,
                activation: Activation::Relu,
                regularized: false,
            })
            .collect();
        layers.push(LayerSpec {
            units: 1,
            activation: Activation::Linear,
            regularized: false,
        });
        let n = layers.len();
        for layer in &mut layers[n.saturating_sub(2)..] {
            layer.regularized = true;
        }
        NetworkConfig {
            input_dim,
            layers,
            lambda,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_dim == 0 {
            return Err(Error::Config("input_dim must be at least 1".into()));
        }
        if let Some(k) = self.layers.iter().position(|l| l.units == 0) {
            return Err(Error::Config(format!("layer {k} has zero units")));
        }
        match self.layers.last() {
            Some(LayerSpec {
                units: 1,
                activation: Activation::Linear,
                ..
            }) => {}
            _ => {
                return Err(Error::Config(
                    "the last layer must be a single linear unit".into(),
                ))
            }
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::Config(format!(
                "lambda must be >= 0, got {}",
                self.lambda
            )));
        }
        Ok(())
    }

    /// `(units, fan_in)` for every layer.
    pub fn shapes(&self) -> Vec<(usize, usize)> {
        let mut fan_in = self.input_dim;
        self.layers
            .iter()
            .map(|l| {
                let shape = (l.units, fan_in);
                fan_in = l.units;
                shape
            })
            .collect()
    }

    pub fn layer_param_counts(&self) -> Vec<usize> {
        self.shapes()
            .into_iter()
            .map(|(units, fan_in)| units * (fan_in + 1))
            .collect()
    }
}

pub fn param_count(config: &NetworkConfig) -> usize {
    config.layer_param_counts().iter().sum()
}

pub fn relu(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        0.0
    }
}

/// Derivative used by backprop: 1 for x > 0, else 0.
pub fn relu_derivative(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub units: usize,
    pub fan_in: usize,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl Dense {
    fn zeros(units: usize, fan_in: usize) -> Dense {
        Dense {
            units,
            fan_in,
            weights: vec![0.0; units * fan_in],
            biases: vec![0.0; units],
        }
    }

    pub fn weight(&self, unit: usize, input: usize) -> f64 {
        self.weights[unit * self.fan_in + input]
    }
}

/// Per-layer weights and biases. Also used for gradients and optimizer moments.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkParams {
    pub layers: Vec<Dense>,
}

pub type Gradients = NetworkParams;

impl NetworkParams {
    pub fn zeros(config: &NetworkConfig) -> NetworkParams {
        NetworkParams {
            layers: config
                .shapes()
                .into_iter()
                .map(|(units, fan_in)| Dense::zeros(units, fan_in))
                .collect(),
        }
    }

    pub fn zeros_like(&self) -> NetworkParams {
        NetworkParams {
            layers: self
                .layers
                .iter()
                .map(|l| Dense::zeros(l.units, l.fan_in))
                .collect(),
        }
    }

    pub fn scalar_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.len() + l.biases.len())
            .sum()
    }

    /// Every scalar, layer by layer, weights (row-major) before biases.
    pub fn values(&self) -> impl Iterator<Item = &f64> {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(&l.biases))
    }

    pub fn values_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.layers
            .iter_mut()
            .flat_map(|l| l.weights.iter_mut().chain(l.biases.iter_mut()))
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.values().copied().collect()
    }

    /// Inverse of [`NetworkParams::to_flat`].
    pub fn from_flat(config: &NetworkConfig, flat: &[f64]) -> Result<NetworkParams> {
        let expected = param_count(config);
        if flat.len() != expected {
            return Err(Error::Shape(format!(
                "parameter payload has {} values, configuration needs {expected}",
                flat.len()
            )));
        }
        let mut params = NetworkParams::zeros(config);
        for (dst, src) in params.values_mut().zip(flat) {
            *dst = *src;
        }
        Ok(params)
    }

    pub fn same_shape(&self, other: &NetworkParams) -> bool {
        self.layers.len() == other.layers.len()
            && self
                .layers
                .iter()
                .zip(&other.layers)
                .all(|(a, b)| a.units == b.units && a.fan_in == b.fan_in)
    }

    pub fn check_shape(&self, config: &NetworkConfig) -> Result<()> {
        let shapes = config.shapes();
        let ok = shapes.len() == self.layers.len()
            && shapes.iter().zip(&self.layers).all(|(&(u, f), l)| {
                l.units == u && l.fan_in == f && l.weights.len() == u * f && l.biases.len() == u
            });
        if ok {
            Ok(())
        } else {
            Err(Error::Shape(
                "parameters do not match the network configuration".into(),
            ))
        }
    }
}

/// Glorot-uniform weights in ±√(6 / (fan_in + units)) and zero biases.
///
/// Draw order is fixed: layers first to last, weights row-major, one
/// `gen::<f64>()` per weight from a ChaCha8 stream seeded with `seed`.
pub fn init_params(config: &NetworkConfig, seed: u64) -> NetworkParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut params = NetworkParams::zeros(config);
    for layer in &mut params.layers {
        let bound = glorot_bound(layer.fan_in, layer.units);
        for w in &mut layer.weights {
            let u: f64 = rng.gen();
            *w = (2.0 * u - 1.0) * bound;
        }
    }
    params
}

pub fn glorot_bound(fan_in: usize, fan_out: usize) -> f64 {
    (6.0 / (fan_in + fan_out) as f64).sqrt()
}

/// Post-activation outputs of every layer, kept for the backward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct Activations {
    pub outputs: Vec<Vec<f64>>,
}

impl Activations {
    pub fn prediction(&self) -> f64 {
        self.outputs.last().map_or(0.0, |o| o[0])
    }
}

pub fn forward(
    config: &NetworkConfig,
    params: &NetworkParams,
    input: &[f64],
) -> Result<(f64, Activations)> {
    if input.len() != config.input_dim {
        return Err(Error::Shape(format!(
            "input has {} components, network expects {}",
            input.len(),
            config.input_dim
        )));
    }
    if let Some(k) = input.iter().position(|x| !x.is_finite()) {
        return Err(Error::NumericInput(format!(
            "input component {k} is {}",
            input[k]
        )));
    }
    params.check_shape(config)?;

    let mut outputs: Vec<Vec<f64>> = Vec::with_capacity(params.layers.len());
    for (layer, spec) in params.layers.iter().zip(&config.layers) {
        let x: &[f64] = outputs.last().map_or(input, |v| v.as_slice());
        let out = layer
            .weights
            .chunks_exact(layer.fan_in)
            .zip(&layer.biases)
            .map(|(row, b)| {
                let z = row.iter().zip(x).fold(*b, |acc, (w, xi)| acc + w * xi);
                spec.activation.apply(z)
            })
            .collect();
        outputs.push(out);
    }
    let acts = Activations { outputs };
    Ok((acts.prediction(), acts))
}

pub fn predict(config: &NetworkConfig, params: &NetworkParams, input: &[f64]) -> Result<f64> {
    forward(config, params, input).map(|(p, _)| p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LossKind {
    Mse,
    Mae,
}

impl LossKind {
    fn point(self, residual: f64) -> f64 {
        match self {
            LossKind::Mse => residual * residual,
            LossKind::Mae => residual.abs(),
        }
    }

    /// d/dŷ of the per-sample loss, where residual = ŷ − y.
    fn derivative(self, residual: f64) -> f64 {
        match self {
            LossKind::Mse => 2.0 * residual,
            LossKind::Mae => {
                if residual > 0.0 {
                    1.0
                } else if residual < 0.0 {
                    -1.0
                } else {
                    0.0
                }
            }
        }
    }
}

impl std::fmt::Display for LossKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LossKind::Mse => "mse",
            LossKind::Mae => "mae",
        })
    }
}

impl std::str::FromStr for LossKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<LossKind> {
        match s {
            "mse" => Ok(LossKind::Mse),
            "mae" => Ok(LossKind::Mae),
            other => Err(Error::Config(format!("unknown loss {other:?}"))),
        }
    }
}

/// Mean of the per-sample loss, without any penalty.
pub fn data_loss(predictions: &[f64], targets: &[f64], kind: LossKind) -> Result<f64> {
    if predictions.len() != targets.len() {
        return Err(Error::Shape(format!(
            "{} predictions but {} targets",
            predictions.len(),
            targets.len()
        )));
    }
    if predictions.is_empty() {
        return Err(Error::EmptyInput("loss over zero samples".into()));
    }
    let sum: f64 = predictions
        .iter()
        .zip(targets)
        .map(|(p, y)| kind.point(p - y))
        .sum();
    Ok(sum / predictions.len() as f64)
}

/// Σθ² over the weights and biases of regularized layers (not yet scaled by λ).
pub fn ridge_sum(config: &NetworkConfig, params: &NetworkParams) -> f64 {
    params
        .layers
        .iter()
        .zip(&config.layers)
        .filter(|(_, spec)| spec.regularized)
        .flat_map(|(l, _)| l.weights.iter().chain(&l.biases))
        .map(|t| t * t)
        .sum()
}

/// Data term plus λ·Σθ² over regularized layers.
pub fn loss(
    predictions: &[f64],
    targets: &[f64],
    kind: LossKind,
    params: &NetworkParams,
    config: &NetworkConfig,
) -> Result<f64> {
    Ok(data_loss(predictions, targets, kind)? + config.lambda * ridge_sum(config, params))
}

/// Gradient of [`loss`] for a single sample, ridge term included.
pub fn backward(
    config: &NetworkConfig,
    params: &NetworkParams,
    activations: &Activations,
    input: &[f64],
    target: f64,
    kind: LossKind,
) -> Gradients {
    let mut grads = params.zeros_like();
    accumulate_data_gradient(
        config,
        params,
        activations,
        input,
        target,
        kind,
        1.0,
        &mut grads,
    );
    add_ridge_gradient(config, params, &mut grads);
    grads
}

/// Adds `scale ·` ∂(per-sample data loss)/∂θ into `grads`.
#[allow(clippy::too_many_arguments)]
pub fn accumulate_data_gradient(
    config: &NetworkConfig,
    params: &NetworkParams,
    activations: &Activations,
    input: &[f64],
    target: f64,
    kind: LossKind,
    scale: f64,
    grads: &mut Gradients,
) {
    let residual = activations.prediction() - target;
    let mut delta = vec![scale * kind.derivative(residual)];

    for k in (0..params.layers.len()).rev() {
        let layer = &params.layers[k];
        let out = &activations.outputs[k];
        if config.layers[k].activation == Activation::Relu {
            for (d, o) in delta.iter_mut().zip(out) {
                *d *= relu_derivative(*o);
            }
        }
        let x: &[f64] = if k == 0 {
            input
        } else {
            &activations.outputs[k - 1]
        };
        let g = &mut grads.layers[k];
        for (i, &d) in delta.iter().enumerate() {
            if d == 0.0 {
                continue;
            }
            g.biases[i] += d;
            let row = &mut g.weights[i * layer.fan_in..(i + 1) * layer.fan_in];
            for (gw, xi) in row.iter_mut().zip(x) {
                *gw += d * xi;
            }
        }
        if k > 0 {
            let mut next = vec![0.0; layer.fan_in];
            for (i, &d) in delta.iter().enumerate() {
                if d == 0.0 {
                    continue;
                }
                let row = &layer.weights[i * layer.fan_in..(i + 1) * layer.fan_in];
                for (n, w) in next.iter_mut().zip(row) {
                    *n += w * d;
                }
            }
            delta = next;
        }
    }
}

/// Adds 2λθ for every parameter of a regularized layer.
pub fn add_ridge_gradient(config: &NetworkConfig, params: &NetworkParams, grads: &mut Gradients) {
    if config.lambda == 0.0 {
        return;
    }
    let two_lambda = 2.0 * config.lambda;
    for ((g, p), spec) in grads
        .layers
        .iter_mut()
        .zip(&params.layers)
        .zip(&config.layers)
    {
        if !spec.regularized {
            continue;
        }
        for (gv, pv) in g
            .weights
            .iter_mut()
            .chain(g.biases.iter_mut())
            .zip(p.weights.iter().chain(&p.biases))
        {
            *gv += two_lambda * pv;
        }
    }
}

/// Loss (ridge included) and its gradient over a batch of `(input, target)` rows.
pub fn batch_loss_and_gradient<'a>(
    config: &NetworkConfig,
    params: &NetworkParams,
    rows: impl ExactSizeIterator<Item = (&'a [f64], f64)>,
    kind: LossKind,
) -> Result<(f64, Gradients)> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::EmptyInput("empty batch".into()));
    }
    let scale = 1.0 / n as f64;
    let mut grads = params.zeros_like();
    let mut data_sum = 0.0;
    for (x, y) in rows {
        let (pred, acts) = forward(config, params, x)?;
        data_sum += kind.point(pred - y);
        accumulate_data_gradient(config, params, &acts, x, y, kind, scale, &mut grads);
    }
    add_ridge_gradient(config, params, &mut grads);
    Ok((
        data_sum / n as f64 + config.lambda * ridge_sum(config, params),
        grads,
    ))
}

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataio::{DatasetSplit, FeatureMatrix};
use crate::error::{Error, Result};
use crate::network::{
    batch_loss_and_gradient, data_loss, init_params, predict, LossKind, NetworkConfig,
    NetworkParams,
};
use crate::optim::{decayed_lr, AdamHyper, AdamState};

/// Minimum validation-loss decrease that resets the patience counter.
pub const MIN_IMPROVEMENT: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub max_epochs: usize,
    pub patience: usize,
    pub loss_kind: LossKind,
    pub seed: u64,
    pub hyper: AdamHyper,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            batch_size: 512,
            max_epochs: 152,
            patience: 10,
            loss_kind: LossKind::Mse,
            seed: 42,
            hyper: AdamHyper::default(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::Config("batch size must be at least 1".into()));
        }
        if self.patience == 0 {
            return Err(Error::Config("patience must be at least 1".into()));
        }
        self.hyper.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Mean of the per-batch losses (ridge included) seen during the epoch.
    pub train_loss: f64,
    /// Data loss of the end-of-epoch parameters on the validation partition.
    pub val_loss: f64,
    pub lr: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainHistory {
    pub epochs: Vec<EpochRecord>,
    pub best_epoch: usize,
    pub stopped_early: bool,
}

impl TrainHistory {
    /// `epoch,train_loss,val_loss,lr` with round-trip float formatting.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epoch,train_loss,val_loss,lr\n");
        for e in &self.epochs {
            out.push_str(&format!(
                "{},{},{},{}\n",
                e.epoch, e.train_loss, e.val_loss, e.lr
            ));
        }
        out
    }
}

/// Mini-batch Adam training with early stopping on validation loss.
///
/// Each epoch shuffles the training rows with a ChaCha8 stream derived from
/// `(cfg.seed, epoch)`, takes one Adam step per batch at `decayed_lr(epoch)`,
/// and then scores the validation partition. The returned parameters are the
/// snapshot with the lowest validation loss.
pub fn train(
    features: &FeatureMatrix,
    split: &DatasetSplit,
    net_config: &NetworkConfig,
    cfg: &TrainConfig,
) -> Result<(NetworkParams, TrainHistory)> {
    net_config.validate()?;
    cfg.validate()?;
    if split.train.is_empty() || split.validation.is_empty() {
        return Err(Error::Config(
            "training and validation partitions must be nonempty".into(),
        ));
    }
    if features.dim() != net_config.input_dim {
        return Err(Error::Shape(format!(
            "features have {} columns, network expects {}",
            features.dim(),
            net_config.input_dim
        )));
    }
    if let Some(&i) = split
        .train
        .iter()
        .chain(&split.validation)
        .find(|&&i| i >= features.len())
    {
        return Err(Error::Shape(format!("row index {i} out of range")));
    }

    let mut params = init_params(net_config, cfg.seed);
    let mut best = params.clone();
    let mut history = TrainHistory::default();
    let mut state = AdamState::new(&params);

    let mut best_val = f64::INFINITY;
    let mut reference = f64::INFINITY;
    let mut waited = 0;

    for epoch in 0..cfg.max_epochs {
        let lr = decayed_lr(&cfg.hyper, epoch);
        let mut order = split.train.clone();
        order.shuffle(&mut epoch_rng(cfg.seed, epoch));

        let mut batch_losses = 0.0;
        let mut batches = 0usize;
        for batch in order.chunks(cfg.batch_size) {
            let rows = batch.iter().map(|&i| (features.row(i), features.target(i)));
            let (loss, grads) = batch_loss_and_gradient(net_config, &params, rows, cfg.loss_kind)
                .map_err(|e| diverged(epoch, e))?;
            if !loss.is_finite() {
                return Err(Error::NumericDivergence {
                    epoch,
                    message: format!("batch {batches} loss is {loss}"),
                });
            }
            state
                .step(&mut params, &grads, &cfg.hyper, lr)
                .map_err(|e| diverged(epoch, e))?;
            batch_losses += loss;
            batches += 1;
        }
        let train_loss = batch_losses / batches as f64;

        let val_loss = evaluate_loss(
            net_config,
            &params,
            features,
            &split.validation,
            cfg.loss_kind,
        )
        .map_err(|e| diverged(epoch, e))?;
        if !val_loss.is_finite() {
            return Err(Error::NumericDivergence {
                epoch,
                message: format!("validation loss is {val_loss}"),
            });
        }
        history.epochs.push(EpochRecord {
            epoch,
            train_loss,
            val_loss,
            lr,
        });

        if val_loss < best_val {
            best_val = val_loss;
            best.clone_from(&params);
            history.best_epoch = epoch;
        }
        if val_loss <= reference - MIN_IMPROVEMENT {
            reference = val_loss;
            waited = 0;
        } else {
            waited += 1;
            if waited >= cfg.patience {
                history.stopped_early = true;
                break;
            }
        }
    }
    Ok((best, history))
}

/// Shuffle stream for one epoch; stream 0 of the same seed is left for initialization.
fn epoch_rng(seed: u64, epoch: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(epoch as u64 + 1);
    rng
}

fn diverged(epoch: usize, e: Error) -> Error {
    match e {
        Error::NumericInput(message) => Error::NumericDivergence { epoch, message },
        other => other,
    }
}

/// Data-fit metrics for a set of rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    /// Loss in standardized target units, no ridge term.
    pub loss: f64,
    /// Mean absolute error after mapping predictions back to W/m².
    pub mae_wpm2: f64,
}

/// Standardized predictions for the given rows.
pub fn predictions(
    net_config: &NetworkConfig,
    params: &NetworkParams,
    features: &FeatureMatrix,
    indices: &[usize],
) -> Result<Vec<f64>> {
    indices
        .iter()
        .map(|&i| {
            if i >= features.len() {
                return Err(Error::Shape(format!("row index {i} out of range")));
            }
            predict(net_config, params, features.row(i))
        })
        .collect()
}

fn evaluate_loss(
    net_config: &NetworkConfig,
    params: &NetworkParams,
    features: &FeatureMatrix,
    indices: &[usize],
    kind: LossKind,
) -> Result<f64> {
    let preds = predictions(net_config, params, features, indices)?;
    let targets: Vec<f64> = indices.iter().map(|&i| features.target(i)).collect();
    data_loss(&preds, &targets, kind)
}

pub fn evaluate(
    net_config: &NetworkConfig,
    params: &NetworkParams,
    features: &FeatureMatrix,
    indices: &[usize],
    kind: LossKind,
) -> Result<Evaluation> {
    if indices.is_empty() {
        return Err(Error::EmptyInput("no rows to evaluate".into()));
    }
    let preds = predictions(net_config, params, features, indices)?;
    let targets: Vec<f64> = indices.iter().map(|&i| features.target(i)).collect();
    let loss = data_loss(&preds, &targets, kind)?;
    let scaler = features.scaler();
    let abs_sum: f64 = preds
        .iter()
        .zip(indices)
        .map(|(&p, &i)| (scaler.unscale_target(p) - features.physical_target(i)).abs())
        .sum();
    Ok(Evaluation {
        loss,
        mae_wpm2: abs_sum / indices.len() as f64,
    })
}

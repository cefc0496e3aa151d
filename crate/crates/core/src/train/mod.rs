//! Mini-batch AdaDelta training, seeded dataset splitting and per-epoch
//! history.

use std::collections::HashMap;
use std::hash::Hash;
use std::path::Path;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::net::{mse, Architecture, Cache, Network, Workspace};
use crate::util::fmt_sig;

mod adadelta;

pub use adadelta::AdaDeltaState;

pub const DEFAULT_BATCH_SIZE: usize = 32;

/// Feature-encoded samples, stored back to back.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Samples {
    pub input_shape: Vec<usize>,
    /// Length of the per-sample auxiliary vector, 0 when absent.
    pub aux_len: usize,
    pub inputs: Vec<f64>,
    pub aux: Vec<f64>,
    pub targets: Vec<f64>,
    /// Split group of each sample; samples sharing a group always land on
    /// the same side of a split.
    pub groups: Vec<usize>,
}

impl Samples {
    pub fn new(input_shape: Vec<usize>, aux_len: usize) -> Self {
        Self {
            input_shape,
            aux_len,
            ..Self::default()
        }
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn input_len(&self) -> usize {
        self.input_shape.iter().product()
    }

    pub fn push(&mut self, input: &[f64], aux: &[f64], target: f64, group: usize) -> Result<()> {
        if input.len() != self.input_len() || aux.len() != self.aux_len {
            return Err(Error::ShapeMismatch(format!(
                "sample has {}+{} values, expected {}+{}",
                input.len(),
                aux.len(),
                self.input_len(),
                self.aux_len
            )));
        }
        self.inputs.extend_from_slice(input);
        self.aux.extend_from_slice(aux);
        self.targets.push(target);
        self.groups.push(group);
        Ok(())
    }

    pub fn input(&self, i: usize) -> &[f64] {
        let n = self.input_len();
        &self.inputs[i * n..(i + 1) * n]
    }

    pub fn aux(&self, i: usize) -> &[f64] {
        &self.aux[i * self.aux_len..(i + 1) * self.aux_len]
    }

    /// Copy of the samples at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Samples {
        let mut out = Samples::new(self.input_shape.clone(), self.aux_len);
        for &i in indices {
            out.inputs.extend_from_slice(self.input(i));
            out.aux.extend_from_slice(self.aux(i));
            out.targets.push(self.targets[i]);
            out.groups.push(self.groups[i]);
        }
        out
    }

    fn check_network(&self, net: &Network) -> Result<()> {
        if net.input_shape() != self.input_shape.as_slice() || net.aux_len().unwrap_or(0) != self.aux_len {
            return Err(Error::ShapeMismatch(format!(
                "samples are {:?}+{} but the network takes {:?}+{}",
                self.input_shape,
                self.aux_len,
                net.input_shape(),
                net.aux_len().unwrap_or(0)
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub split_train_fraction: f64,
    pub seed: u64,
    pub architecture: Architecture,
    pub rho: f64,
    pub eps: f64,
}

impl TrainConfig {
    pub fn new(architecture: Architecture, epochs: usize, split_train_fraction: f64, seed: u64) -> Self {
        Self {
            epochs,
            batch_size: DEFAULT_BATCH_SIZE,
            split_train_fraction,
            seed,
            architecture,
            rho: adadelta::DEFAULT_RHO,
            eps: adadelta::DEFAULT_EPS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |why: &str| Err(Error::InvalidConfig(why.into()));
        if self.epochs == 0 {
            return bad("epochs must be at least 1");
        }
        if self.batch_size == 0 {
            return bad("batch size must be at least 1");
        }
        if !(self.split_train_fraction > 0.0 && self.split_train_fraction < 1.0) {
            return bad("split fraction must lie strictly between 0 and 1");
        }
        if !(self.rho > 0.0 && self.rho < 1.0) || !(self.eps > 0.0) {
            return bad("AdaDelta needs 0 < rho < 1 and eps > 0");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Mean of the mini-batch losses seen during the epoch.
    pub train_mse: f64,
    pub val_mse: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainHistory {
    pub records: Vec<EpochRecord>,
}

impl TrainHistory {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&EpochRecord> {
        self.records.last()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("epoch,train_mse,val_mse,seconds\n");
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.epoch,
                fmt_sig(r.train_mse, 10),
                fmt_sig(r.val_mse, 10),
                fmt_sig(r.seconds, 10)
            ));
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }
}

/// Partitions item indices by a seeded shuffle of their group keys.
///
/// Groups are added to the training side until it holds at least
/// `round(fraction * n)` items (clamped to `1..n` when `n > 1`); with two or
/// more groups the validation side is never left empty. Both index lists come
/// back sorted.
pub fn split_indices<K: Hash + Eq + Clone>(
    keys: &[K],
    fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if keys.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidConfig(format!("split fraction {fraction} outside (0, 1)")));
    }
    let mut order: Vec<K> = Vec::new();
    let mut members: HashMap<K, Vec<usize>> = HashMap::new();
    for (i, k) in keys.iter().enumerate() {
        members
            .entry(k.clone())
            .or_insert_with(|| {
                order.push(k.clone());
                Vec::new()
            })
            .push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);

    let n = keys.len();
    let target = ((fraction * n as f64).round() as usize).clamp(1, n.saturating_sub(1).max(1));
    let mut train = Vec::with_capacity(target);
    let mut val = Vec::with_capacity(n - target.min(n));
    let last = order.len() - 1;
    for (j, k) in order.iter().enumerate() {
        let keep_val = j == last && j > 0 && val.is_empty();
        let side = if train.len() < target && !keep_val { &mut train } else { &mut val };
        side.extend_from_slice(&members[k]);
    }
    train.sort_unstable();
    val.sort_unstable();
    Ok((train, val))
}

/// Seeded split of encoded samples, honoring their groups.
pub fn split_samples(samples: &Samples, fraction: f64, seed: u64) -> Result<(Samples, Samples)> {
    let (train, val) = split_indices(&samples.groups, fraction, seed)?;
    Ok((samples.subset(&train), samples.subset(&val)))
}

/// Mean squared error of `net` over `samples`; 0 for an empty set.
pub fn evaluate(net: &Network, samples: &Samples) -> Result<f64> {
    let pred = predict_all(net, samples)?;
    if pred.is_empty() {
        return Ok(0.0);
    }
    Ok(mse(&pred, &samples.targets).0)
}

/// Predictions for every sample, computed in batches.
pub fn predict_all(net: &Network, samples: &Samples) -> Result<Vec<f64>> {
    samples.check_network(net)?;
    let mut out = Vec::with_capacity(samples.len());
    let mut cache = Cache::default();
    let (n, a) = (samples.input_len(), samples.aux_len);
    let mut start = 0;
    while start < samples.len() {
        let end = (start + DEFAULT_BATCH_SIZE).min(samples.len());
        let aux = (a > 0).then(|| &samples.aux[start * a..end * a]);
        net.forward_into(end - start, &samples.inputs[start * n..end * n], aux, &mut cache)?;
        out.extend_from_slice(cache.output());
        start = end;
    }
    Ok(out)
}

/// Single prediction from one encoded sample.
pub fn predict(net: &Network, input: &[f64], aux: Option<&[f64]>) -> Result<f64> {
    let y = net.predict_batch(1, input, aux)?;
    match y.as_slice() {
        [v] => Ok(*v),
        _ => Err(Error::ShapeMismatch(format!("network has {} outputs, expected 1", y.len()))),
    }
}

/// Splits `samples` per `cfg` and trains on the training side.
pub fn train(net: &mut Network, samples: &Samples, cfg: &TrainConfig) -> Result<TrainHistory> {
    cfg.validate()?;
    let (train_set, val_set) = split_samples(samples, cfg.split_train_fraction, cfg.seed)?;
    fit(net, &train_set, &val_set, cfg, |_| {})
}

/// Runs `cfg.epochs` epochs of mini-batch AdaDelta on `train_set`, calling
/// `on_epoch` after each epoch. The split fraction of `cfg` is not used.
pub fn fit(
    net: &mut Network,
    train_set: &Samples,
    val_set: &Samples,
    cfg: &TrainConfig,
    mut on_epoch: impl FnMut(&EpochRecord),
) -> Result<TrainHistory> {
    if cfg.epochs == 0 || cfg.batch_size == 0 {
        return Err(Error::InvalidConfig("epochs and batch size must be at least 1".into()));
    }
    if train_set.is_empty() {
        return Err(Error::EmptyDataset);
    }
    train_set.check_network(net)?;
    val_set.check_network(net)?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(1);
    let mut state = AdaDeltaState::new(net, cfg.rho, cfg.eps);
    let mut grads = net.zero_gradients();
    let mut cache = Cache::default();
    let mut work = Workspace::default();
    let (n, a) = (train_set.input_len(), train_set.aux_len);
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    let mut inputs = Vec::new();
    let mut aux = Vec::new();
    let mut targets = Vec::new();
    let mut history = TrainHistory::default();

    for epoch in 1..=cfg.epochs {
        let start = Instant::now();
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            inputs.clear();
            aux.clear();
            targets.clear();
            for &i in batch {
                inputs.extend_from_slice(&train_set.inputs[i * n..(i + 1) * n]);
                aux.extend_from_slice(&train_set.aux[i * a..(i + 1) * a]);
                targets.push(train_set.targets[i]);
            }
            let aux_ref = (a > 0).then_some(aux.as_slice());
            net.forward_into(batch.len(), &inputs, aux_ref, &mut cache)?;
            let (loss, grad) = mse(cache.output(), &targets);
            if !loss.is_finite() {
                return Err(Error::NonFiniteLoss { epoch });
            }
            loss_sum += loss * batch.len() as f64;
            net.backward_into(&cache, &grad, &mut grads, &mut work)?;
            state.step(net, &grads)?;
        }
        let train_mse = loss_sum / train_set.len() as f64;
        let val_mse = evaluate(net, val_set)?;
        if !val_mse.is_finite() {
            return Err(Error::NonFiniteLoss { epoch });
        }
        let record = EpochRecord {
            epoch,
            train_mse,
            val_mse,
            seconds: start.elapsed().as_secs_f64(),
        };
        on_epoch(&record);
        history.records.push(record);
    }
    Ok(history)
}

/// Pearson correlation of two equally long series.
pub fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len()) as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    sab / (saa * sbb).sqrt()
}

use ndarray::{s, Array2};
use rand::seq::SliceRandom;

use super::network::{bce_loss, Inputs, Network};
use super::optim::{Nadam, NadamConfig};
use super::{NetworkSpec, NnError};
use crate::codec::{EncodedExample, SparseInput};
use crate::metrics::{self, Metrics, DEFAULT_THRESHOLD};
use crate::rng;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub inner_batch: usize,
    pub dropout_rate: f64,
    pub optimizer: NadamConfig,
    pub threshold: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 5,
            inner_batch: 256,
            dropout_rate: 0.2,
            optimizer: NadamConfig::default(),
            threshold: DEFAULT_THRESHOLD,
            seed: 0,
        }
    }
}

/// Network parameters plus optimizer moments.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelState {
    pub network: Network,
    pub optimizer: Nadam,
}

impl ModelState {
    pub fn new(spec: NetworkSpec, cfg: &TrainConfig) -> Result<Self, NnError> {
        let network = Network::new(spec, &mut rng::stream(cfg.seed, "init"))?;
        Ok(ModelState {
            network,
            optimizer: Nadam::new(cfg.optimizer),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    /// Mean training-mode loss over the epoch's mini-batches.
    pub loss: f64,
    pub train: Metrics,
    pub validation: Option<Metrics>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainTrace {
    pub epochs: Vec<EpochStats>,
}

pub fn examples_to_targets(examples: &[&EncodedExample], width: usize) -> Array2<f64> {
    let mut y = Array2::zeros((examples.len(), width));
    for (r, e) in examples.iter().enumerate() {
        for l in e.targets.iter() {
            y[[r, l as usize]] = 1.0;
        }
    }
    y
}

/// Inference over `examples`, `chunk` rows at a time.
pub fn predict_batches(
    net: &Network,
    examples: &[&EncodedExample],
    chunk: usize,
) -> Result<Array2<f64>, NnError> {
    let mut out = Array2::zeros((examples.len(), net.spec().output_width));
    for (k, part) in examples.chunks(chunk.max(1)).enumerate() {
        let rows: Vec<&SparseInput> = part.iter().map(|e| &e.input).collect();
        let p = net.predict(Inputs::Sparse(&rows))?;
        let start = k * chunk.max(1);
        out.slice_mut(s![start..start + part.len(), ..]).assign(&p);
    }
    Ok(out)
}

fn evaluate(
    net: &Network,
    examples: &[&EncodedExample],
    threshold: f64,
) -> Result<Metrics, NnError> {
    let probs = predict_batches(net, examples, 1024)?;
    let predicted = metrics::predict_labels(probs.view(), threshold);
    let actual: Vec<_> = examples.iter().map(|e| e.targets.clone()).collect();
    metrics::micro_f1(&predicted, &actual).map_err(|e| NnError::ShapeMismatch(e.to_string()))
}

/// Mini-batch training. Each epoch walks the outer batches in order and
/// cuts each into shuffled inner batches of `cfg.inner_batch`.
pub fn train(
    state: &mut ModelState,
    batches: &[Vec<EncodedExample>],
    validation: Option<&[EncodedExample]>,
    cfg: &TrainConfig,
) -> Result<TrainTrace, NnError> {
    assert!(cfg.inner_batch >= 1, "inner_batch must be at least 1");
    let width = state.network.spec().output_width;
    let all_train: Vec<&EncodedExample> = batches.iter().flatten().collect();
    let val: Option<Vec<&EncodedExample>> = validation.map(|v| v.iter().collect());
    let mut trace = TrainTrace::default();
    for epoch in 1..=cfg.epochs {
        let mut order_rng = rng::stream(cfg.seed, &format!("shuffle/{epoch}"));
        let mut dropout_rng = rng::stream(cfg.seed, &format!("dropout/{epoch}"));
        let (mut loss_sum, mut seen) = (0.0, 0usize);
        for batch in batches {
            let mut order: Vec<usize> = (0..batch.len()).collect();
            order.shuffle(&mut order_rng);
            for inner in order.chunks(cfg.inner_batch) {
                let examples: Vec<&EncodedExample> = inner.iter().map(|&i| &batch[i]).collect();
                let rows: Vec<&SparseInput> = examples.iter().map(|e| &e.input).collect();
                let y = examples_to_targets(&examples, width);
                let cache = state
                    .network
                    .forward_train(Inputs::Sparse(&rows), &mut dropout_rng)?;
                loss_sum += bce_loss(cache.probs().view(), y.view())? * examples.len() as f64;
                seen += examples.len();
                let grads = state.network.backward(&cache, y.view())?;
                state.network.update_running_stats(&cache);
                state.optimizer.update(&mut state.network, &grads);
            }
        }
        let train_metrics = evaluate(&state.network, &all_train, cfg.threshold)?;
        let validation = match &val {
            Some(v) if !v.is_empty() => Some(evaluate(&state.network, v, cfg.threshold)?),
            _ => None,
        };
        trace.epochs.push(EpochStats {
            epoch,
            loss: if seen == 0 {
                0.0
            } else {
                loss_sum / seen as f64
            },
            train: train_metrics,
            validation,
        });
    }
    Ok(trace)
}

use ndarray::{Array1, Array2, ArrayView2, Axis, Zip};
use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::{NetworkSpec, NnError};
use crate::codec::SparseInput;

pub const BN_MOMENTUM: f64 = 0.99;
pub const BN_EPSILON: f64 = 1e-3;
/// Probabilities are clamped to `[PROB_EPSILON, 1 - PROB_EPSILON]`.
pub const PROB_EPSILON: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Batch statistics and dropout.
    Train,
    /// Running statistics, no dropout.
    Infer,
}

/// A batch of network inputs, one row per example.
#[derive(Debug, Clone, Copy)]
pub enum Inputs<'a> {
    Dense(ArrayView2<'a, f64>),
    Sparse(&'a [&'a SparseInput]),
}

impl Inputs<'_> {
    pub fn rows(&self) -> usize {
        match self {
            Inputs::Dense(x) => x.nrows(),
            Inputs::Sparse(rows) => rows.len(),
        }
    }

    fn check_width(&self, width: usize) -> Result<(), NnError> {
        match self {
            Inputs::Dense(x) if x.ncols() != width => Err(NnError::ShapeMismatch(format!(
                "input has {} columns, network expects {width}",
                x.ncols()
            ))),
            Inputs::Sparse(rows) => match rows
                .iter()
                .flat_map(|r| r.iter())
                .find(|&(c, _)| c as usize >= width)
            {
                Some((c, _)) => Err(NnError::ShapeMismatch(format!(
                    "sparse input position {c} outside width {width}"
                ))),
                None => Ok(()),
            },
            _ => Ok(()),
        }
    }

    /// `self · w`.
    fn matmul(&self, w: &Array2<f64>) -> Array2<f64> {
        match self {
            Inputs::Dense(x) => x.dot(w),
            Inputs::Sparse(rows) => {
                let mut z = Array2::zeros((rows.len(), w.ncols()));
                for (r, row) in rows.iter().enumerate() {
                    let mut zr = z.row_mut(r);
                    for (c, v) in row.iter() {
                        zr.scaled_add(f64::from(v), &w.row(c as usize));
                    }
                }
                z
            }
        }
    }

    /// `selfᵀ · dz`.
    fn transpose_matmul(&self, dz: &Array2<f64>, width: usize) -> Array2<f64> {
        match self {
            Inputs::Dense(x) => x.t().dot(dz),
            Inputs::Sparse(rows) => {
                let mut dw = Array2::zeros((width, dz.ncols()));
                for (r, row) in rows.iter().enumerate() {
                    for (c, v) in row.iter() {
                        dw.row_mut(c as usize).scaled_add(f64::from(v), &dz.row(r));
                    }
                }
                dw
            }
        }
    }
}

#[derive(Debug, Clone)]
enum OwnedInputs {
    Dense(Array2<f64>),
    Sparse(Vec<SparseInput>),
}

impl OwnedInputs {
    fn from(x: &Inputs) -> Self {
        match x {
            Inputs::Dense(v) => OwnedInputs::Dense(v.to_owned()),
            Inputs::Sparse(rows) => {
                OwnedInputs::Sparse(rows.iter().map(|r| (*r).clone()).collect())
            }
        }
    }
}

/// Batch-norm scale and shift plus running statistics.
///
/// The running mean and variance are exponential moving averages started at
/// zero and divided by `1 - momentum^updates` when read, so a short training
/// run does not leave them anchored to their initial values.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchNorm {
    pub gamma: Array1<f64>,
    pub beta: Array1<f64>,
    pub mean_ema: Array1<f64>,
    pub var_ema: Array1<f64>,
    pub updates: u64,
}

impl BatchNorm {
    fn new(width: usize) -> Self {
        BatchNorm {
            gamma: Array1::ones(width),
            beta: Array1::zeros(width),
            mean_ema: Array1::zeros(width),
            var_ema: Array1::zeros(width),
            updates: 0,
        }
    }

    pub fn running_mean(&self) -> Array1<f64> {
        if self.updates == 0 {
            return Array1::zeros(self.mean_ema.len());
        }
        &self.mean_ema / self.correction()
    }

    /// Floored at [`BN_EPSILON`]; 1 before any update.
    pub fn running_var(&self) -> Array1<f64> {
        if self.updates == 0 {
            return Array1::ones(self.var_ema.len());
        }
        let c = self.correction();
        self.var_ema.mapv(|v| (v / c).max(BN_EPSILON))
    }

    fn correction(&self) -> f64 {
        1.0 - BN_MOMENTUM.powi(self.updates.min(i32::MAX as u64) as i32)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
    pub batch_norm: Option<BatchNorm>,
    pub dropout_rate: f64,
    /// Hidden layers use relu; the output layer is linear before the sigmoid.
    pub hidden: bool,
}

/// Weights from `N(0, 2 / (fan_in + fan_out))`.
pub fn glorot_init<R: Rng + ?Sized>(fan_in: usize, fan_out: usize, rng: &mut R) -> Array2<f64> {
    let sigma = (2.0 / (fan_in + fan_out) as f64).sqrt();
    let normal = Normal::new(0.0, sigma).expect("finite sigma");
    Array2::from_shape_simple_fn((fan_in, fan_out), || normal.sample(rng))
}

#[derive(Debug, Clone)]
struct LayerCache {
    /// Post-dropout activations fed to the next layer.
    out: Array2<f64>,
    /// Pre-relu values (after batch norm), hidden layers only.
    pre_act: Option<Array2<f64>>,
    x_hat: Option<Array2<f64>>,
    inv_std: Option<Array1<f64>>,
    batch_mean: Option<Array1<f64>>,
    batch_var: Option<Array1<f64>>,
    dropout_mask: Option<Array2<f64>>,
}

/// Intermediates of a training-mode forward pass.
#[derive(Debug, Clone)]
pub struct Cache {
    input: OwnedInputs,
    layers: Vec<LayerCache>,
    /// Unclamped sigmoid outputs.
    raw_probs: Array2<f64>,
}

impl Cache {
    /// Clamped output probabilities.
    pub fn probs(&self) -> Array2<f64> {
        self.raw_probs.mapv(clamp_prob)
    }

    /// Batch-normalized pre-activations of layer `i` (before scale and
    /// shift), if it has batch norm.
    pub fn normalized(&self, i: usize) -> Option<ArrayView2<'_, f64>> {
        self.layers.get(i)?.x_hat.as_ref().map(|x| x.view())
    }

    /// Output of layer `i` after activation and dropout.
    pub fn activations(&self, i: usize) -> Option<ArrayView2<'_, f64>> {
        self.layers.get(i).map(|l| l.out.view())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerGradients {
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
    pub gamma: Option<Array1<f64>>,
    pub beta: Option<Array1<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<LayerGradients>,
}

impl Gradients {
    /// Same order as [`Network::params`].
    pub fn slices(&self) -> Vec<&[f64]> {
        let mut out = Vec::new();
        for l in &self.layers {
            out.push(l.weights.as_slice().expect("standard layout"));
            out.push(l.bias.as_slice().expect("standard layout"));
            if let (Some(g), Some(b)) = (&l.gamma, &l.beta) {
                out.push(g.as_slice().expect("standard layout"));
                out.push(b.as_slice().expect("standard layout"));
            }
        }
        out
    }

    pub fn scale(&mut self, k: f64) {
        for l in &mut self.layers {
            l.weights *= k;
            l.bias *= k;
            if let Some(g) = &mut l.gamma {
                *g *= k;
            }
            if let Some(b) = &mut l.beta {
                *b *= k;
            }
        }
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn clamp_prob(p: f64) -> f64 {
    p.clamp(PROB_EPSILON, 1.0 - PROB_EPSILON)
}

/// Mean binary cross-entropy over every (example, label) pair.
pub fn bce_loss(probs: ArrayView2<f64>, targets: ArrayView2<f64>) -> Result<f64, NnError> {
    if probs.dim() != targets.dim() {
        return Err(NnError::ShapeMismatch(format!(
            "probabilities {:?} vs targets {:?}",
            probs.dim(),
            targets.dim()
        )));
    }
    if probs.is_empty() {
        return Ok(0.0);
    }
    let mut total = 0.0;
    Zip::from(&probs).and(&targets).for_each(|&p, &y| {
        let p = clamp_prob(p);
        total -= y * p.ln() + (1.0 - y) * (1.0 - p).ln();
    });
    Ok(total / probs.len() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    spec: NetworkSpec,
    layers: Vec<Layer>,
}

impl Network {
    /// Glorot-normal weights, zero biases, identity batch norm.
    pub fn new<R: Rng + ?Sized>(spec: NetworkSpec, rng: &mut R) -> Result<Self, NnError> {
        spec.validate()?;
        let shapes = spec.layer_shapes();
        let last = shapes.len() - 1;
        let layers = shapes
            .iter()
            .enumerate()
            .map(|(i, &(fan_in, fan_out))| {
                let hidden = spec.hidden.get(i);
                Layer {
                    weights: glorot_init(fan_in, fan_out, rng),
                    bias: Array1::zeros(fan_out),
                    batch_norm: hidden
                        .filter(|h| h.batch_norm)
                        .map(|_| BatchNorm::new(fan_out)),
                    dropout_rate: hidden.map_or(0.0, |h| h.dropout_rate),
                    hidden: i != last,
                }
            })
            .collect();
        Ok(Network { spec, layers })
    }

    pub(crate) fn from_parts(spec: NetworkSpec, layers: Vec<Layer>) -> Self {
        Network { spec, layers }
    }

    pub fn spec(&self) -> &NetworkSpec {
        &self.spec
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    /// Trainable parameters: per layer weights, bias, then batch-norm scale
    /// and shift when present.
    pub fn params(&self) -> Vec<&[f64]> {
        let mut out = Vec::new();
        for l in &self.layers {
            out.push(l.weights.as_slice().expect("standard layout"));
            out.push(l.bias.as_slice().expect("standard layout"));
            if let Some(bn) = &l.batch_norm {
                out.push(bn.gamma.as_slice().expect("standard layout"));
                out.push(bn.beta.as_slice().expect("standard layout"));
            }
        }
        out
    }

    pub fn params_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out = Vec::new();
        for l in &mut self.layers {
            out.push(l.weights.as_slice_mut().expect("standard layout"));
            out.push(l.bias.as_slice_mut().expect("standard layout"));
            if let Some(bn) = &mut l.batch_norm {
                out.push(bn.gamma.as_slice_mut().expect("standard layout"));
                out.push(bn.beta.as_slice_mut().expect("standard layout"));
            }
        }
        out
    }

    /// Training-mode forward pass; keeps what [`Network::backward`] needs.
    pub fn forward_train<R: Rng + ?Sized>(&self, x: Inputs, rng: &mut R) -> Result<Cache, NnError> {
        x.check_width(self.spec.input_width)?;
        let mut caches: Vec<LayerCache> = Vec::with_capacity(self.layers.len());
        let mut raw_probs = None;
        for (i, layer) in self.layers.iter().enumerate() {
            let mut z = match caches.last() {
                None => x.matmul(&layer.weights),
                Some(prev) => prev.out.dot(&layer.weights),
            };
            z += &layer.bias;
            if !layer.hidden {
                raw_probs = Some(z.mapv_into(sigmoid));
                break;
            }
            let mut cache = LayerCache {
                out: Array2::zeros((0, 0)),
                pre_act: None,
                x_hat: None,
                inv_std: None,
                batch_mean: None,
                batch_var: None,
                dropout_mask: None,
            };
            let y = match &layer.batch_norm {
                Some(bn) => {
                    let n = z.nrows() as f64;
                    let mean = z.sum_axis(Axis(0)) / n;
                    let centered = &z - &mean;
                    let var = centered.mapv(|v| v * v).sum_axis(Axis(0)) / n;
                    let inv_std = var.mapv(|v| 1.0 / (v + BN_EPSILON).sqrt());
                    let x_hat = centered * &inv_std;
                    let y = &x_hat * &bn.gamma + &bn.beta;
                    cache.x_hat = Some(x_hat);
                    cache.inv_std = Some(inv_std);
                    cache.batch_mean = Some(mean);
                    cache.batch_var = Some(var);
                    y
                }
                None => z,
            };
            let mut out = y.mapv(|v| v.max(0.0));
            if layer.dropout_rate > 0.0 {
                let keep = 1.0 - layer.dropout_rate;
                let mask = Array2::from_shape_simple_fn(out.dim(), || {
                    if rng.random::<f64>() < keep {
                        1.0 / keep
                    } else {
                        0.0
                    }
                });
                out *= &mask;
                cache.dropout_mask = Some(mask);
            }
            cache.pre_act = Some(y);
            cache.out = out;
            caches.push(cache);
            debug_assert!(i + 1 < self.layers.len());
        }
        Ok(Cache {
            input: OwnedInputs::from(&x),
            layers: caches,
            raw_probs: raw_probs.expect("network ends with an output layer"),
        })
    }

    /// Inference: running statistics, no dropout. Clamped probabilities.
    pub fn predict(&self, x: Inputs) -> Result<Array2<f64>, NnError> {
        x.check_width(self.spec.input_width)?;
        let mut a: Option<Array2<f64>> = None;
        for layer in &self.layers {
            let mut z = match &a {
                None => x.matmul(&layer.weights),
                Some(prev) => prev.dot(&layer.weights),
            };
            z += &layer.bias;
            if !layer.hidden {
                return Ok(z.mapv_into(|v| clamp_prob(sigmoid(v))));
            }
            if let Some(bn) = &layer.batch_norm {
                let inv_std = bn.running_var().mapv(|v| 1.0 / (v + BN_EPSILON).sqrt());
                z = (z - &bn.running_mean()) * &inv_std * &bn.gamma + &bn.beta;
            }
            a = Some(z.mapv_into(|v| v.max(0.0)));
        }
        unreachable!("network ends with an output layer")
    }

    pub fn forward(
        &self,
        x: Inputs,
        mode: Mode,
        rng: &mut impl Rng,
    ) -> Result<Array2<f64>, NnError> {
        match mode {
            Mode::Train => Ok(self.forward_train(x, rng)?.probs()),
            Mode::Infer => self.predict(x),
        }
    }

    /// Exact gradients of [`bce_loss`] for the batch in `cache`.
    pub fn backward(&self, cache: &Cache, targets: ArrayView2<f64>) -> Result<Gradients, NnError> {
        let p = &cache.raw_probs;
        if p.dim() != targets.dim() {
            return Err(NnError::ShapeMismatch(format!(
                "outputs {:?} vs targets {:?}",
                p.dim(),
                targets.dim()
            )));
        }
        let scale = 1.0 / p.len() as f64;
        // the clamp flattens the loss outside [eps, 1 - eps]
        let mut dz = Zip::from(p).and(&targets).map_collect(|&p, &y| {
            if (PROB_EPSILON..=1.0 - PROB_EPSILON).contains(&p) {
                (p - y) * scale
            } else {
                0.0
            }
        });

        let mut grads = Vec::with_capacity(self.layers.len());
        for (i, layer) in self.layers.iter().enumerate().rev() {
            if layer.hidden {
                let lc = &cache.layers[i];
                let mut dy = dz;
                if let Some(mask) = &lc.dropout_mask {
                    dy *= mask;
                }
                Zip::from(&mut dy)
                    .and(lc.pre_act.as_ref().expect("hidden cache"))
                    .for_each(|d, &y| {
                        if y <= 0.0 {
                            *d = 0.0
                        }
                    });
                let (mut dgamma, mut dbeta) = (None, None);
                dz = match &layer.batch_norm {
                    Some(bn) => {
                        let x_hat = lc.x_hat.as_ref().expect("bn cache");
                        let inv_std = lc.inv_std.as_ref().expect("bn cache");
                        let n = dy.nrows() as f64;
                        dgamma = Some((&dy * x_hat).sum_axis(Axis(0)));
                        dbeta = Some(dy.sum_axis(Axis(0)));
                        let dx_hat = dy * &bn.gamma;
                        let sum_dx = dx_hat.sum_axis(Axis(0));
                        let sum_dx_xhat = (&dx_hat * x_hat).sum_axis(Axis(0));
                        (dx_hat * n - &sum_dx - x_hat * &sum_dx_xhat) * &(inv_std / n)
                    }
                    None => dy,
                };
                grads.push(self.dense_grads(cache, i, &dz, dgamma, dbeta));
            } else {
                grads.push(self.dense_grads(cache, i, &dz, None, None));
            }
            if i > 0 {
                dz = dz.dot(&layer.weights.t());
            }
        }
        grads.reverse();
        Ok(Gradients { layers: grads })
    }

    fn dense_grads(
        &self,
        cache: &Cache,
        i: usize,
        dz: &Array2<f64>,
        gamma: Option<Array1<f64>>,
        beta: Option<Array1<f64>>,
    ) -> LayerGradients {
        let weights = if i == 0 {
            let sparse_refs: Vec<&SparseInput>;
            let x = match &cache.input {
                OwnedInputs::Dense(x) => Inputs::Dense(x.view()),
                OwnedInputs::Sparse(rows) => {
                    sparse_refs = rows.iter().collect();
                    Inputs::Sparse(&sparse_refs)
                }
            };
            x.transpose_matmul(dz, self.spec.input_width)
        } else {
            cache.layers[i - 1].out.t().dot(dz)
        };
        LayerGradients {
            weights,
            bias: dz.sum_axis(Axis(0)),
            gamma,
            beta,
        }
    }

    /// Folds the batch statistics of a training pass into the running
    /// estimates used at inference.
    pub fn update_running_stats(&mut self, cache: &Cache) {
        for (layer, lc) in self.layers.iter_mut().zip(&cache.layers) {
            if let (Some(bn), Some(mean), Some(var)) =
                (&mut layer.batch_norm, &lc.batch_mean, &lc.batch_var)
            {
                Zip::from(&mut bn.mean_ema)
                    .and(mean)
                    .for_each(|r, &m| *r = BN_MOMENTUM * *r + (1.0 - BN_MOMENTUM) * m);
                Zip::from(&mut bn.var_ema)
                    .and(var)
                    .for_each(|r, &v| *r = BN_MOMENTUM * *r + (1.0 - BN_MOMENTUM) * v);
                bn.updates += 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::Preset;
    use ndarray::array;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(42)
    }

    #[test]
    fn zero_logreg_outputs_half() {
        let mut net = Network::new(Preset::LogReg.spec(3, 2, 0.2), &mut rng()).unwrap();
        net.layers_mut()[0].weights.fill(0.0);
        let x = array![[1.0, -2.0, 3.0], [0.0, 5.0, 1.0]];
        let p = net.predict(Inputs::Dense(x.view())).unwrap();
        assert!(p.iter().all(|&v| v == 0.5));
    }

    #[test]
    fn infer_is_deterministic() {
        let net = Network::new(Preset::Dnn4.toy_spec(4, 6, 3), &mut rng()).unwrap();
        let x = array![[1.0, 0.0, 2.0, 1.0], [0.5, 0.5, 0.0, 3.0]];
        let a = net.predict(Inputs::Dense(x.view())).unwrap();
        let b = net.predict(Inputs::Dense(x.view())).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|&p| p > 0.0 && p < 1.0));
    }

    #[test]
    fn single_example_batch_norm_is_zero() {
        let net = Network::new(NetworkSpec::mlp(3, &[4], 2, 0.0), &mut rng()).unwrap();
        let x = array![[1.0, 2.0, 3.0]];
        let cache = net
            .forward_train(Inputs::Dense(x.view()), &mut rng())
            .unwrap();
        let x_hat = cache.layers[0].x_hat.as_ref().unwrap();
        assert!(x_hat.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn sparse_and_dense_agree() {
        let net = Network::new(Preset::Dnn4.toy_spec(6, 5, 3), &mut rng()).unwrap();
        let rows = [
            SparseInput(vec![(0, 1), (4, 2)]),
            SparseInput(vec![(1, 1), (5, 3)]),
            SparseInput(vec![]),
        ];
        let refs: Vec<&SparseInput> = rows.iter().collect();
        let mut dense = Array2::zeros((3, 6));
        for (r, row) in rows.iter().enumerate() {
            for (c, v) in row.iter() {
                dense[[r, c as usize]] = f64::from(v);
            }
        }
        let targets = array![[1.0, 0.0, 1.0], [0.0, 0.0, 1.0], [1.0, 1.0, 0.0]];
        let cs = net
            .forward_train(Inputs::Sparse(&refs), &mut rng())
            .unwrap();
        let cd = net
            .forward_train(Inputs::Dense(dense.view()), &mut rng())
            .unwrap();
        let (ps, pd) = (cs.probs(), cd.probs());
        assert!(ps.iter().zip(pd.iter()).all(|(a, b)| (a - b).abs() < 1e-12));
        let gs = net.backward(&cs, targets.view()).unwrap();
        let gd = net.backward(&cd, targets.view()).unwrap();
        for (a, b) in gs.slices().iter().zip(gd.slices()) {
            assert!(a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12));
        }
        let bad = [SparseInput(vec![(6, 1)])];
        let bad_refs: Vec<&SparseInput> = bad.iter().collect();
        assert!(net.predict(Inputs::Sparse(&bad_refs)).is_err());
    }

    #[test]
    fn bce_examples() {
        let half = Array2::from_elem((2, 3), 0.5);
        let y = array![[1.0, 0.0, 1.0], [0.0, 0.0, 1.0]];
        assert!((bce_loss(half.view(), y.view()).unwrap() - std::f64::consts::LN_2).abs() < 1e-12);
        assert!(bce_loss(y.view(), y.view()).unwrap() < 1e-6);
        let p = array![[0.9, 0.1]];
        let t = array![[1.0, 0.0]];
        assert!((bce_loss(p.view(), t.view()).unwrap() + 0.9f64.ln()).abs() < 1e-12);
        assert!(bce_loss(p.view(), y.view()).is_err());
    }

    #[test]
    fn gradients_vanish_at_clamped_optimum() {
        let mut net = Network::new(Preset::LogReg.spec(3, 2, 0.2), &mut rng()).unwrap();
        net.layers_mut()[0].weights.fill(0.0);
        net.layers_mut()[0].bias = array![60.0, -60.0];
        let x = array![[1.0, 2.0, 3.0], [0.0, 1.0, 0.0]];
        let y = array![[1.0, 0.0], [1.0, 0.0]];
        let cache = net
            .forward_train(Inputs::Dense(x.view()), &mut rng())
            .unwrap();
        let g = net.backward(&cache, y.view()).unwrap();
        assert!(g.slices().iter().all(|s| s.iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn running_stats_move_toward_batch() {
        let mut net = Network::new(NetworkSpec::mlp(2, &[3], 1, 0.0), &mut rng()).unwrap();
        let x = array![[10.0, 0.0], [0.0, 10.0], [5.0, 5.0]];
        let cache = net
            .forward_train(Inputs::Dense(x.view()), &mut rng())
            .unwrap();
        net.update_running_stats(&cache);
        let bn = net.layers()[0].batch_norm.as_ref().unwrap();
        let mean = cache.layers[0].batch_mean.as_ref().unwrap();
        let var = cache.layers[0].batch_var.as_ref().unwrap();
        // one update: the corrected averages equal the batch statistics
        for (r, m) in bn.running_mean().iter().zip(mean) {
            assert!((r - m).abs() < 1e-9);
        }
        for (r, v) in bn.running_var().iter().zip(var) {
            assert!((r - v.max(BN_EPSILON)).abs() < 1e-9);
        }
        let second = net
            .forward_train(Inputs::Dense((&x * 2.0).view()), &mut rng())
            .unwrap();
        net.update_running_stats(&second);
        let bn = net.layers()[0].batch_norm.as_ref().unwrap();
        let m2 = second.layers[0].batch_mean.as_ref().unwrap();
        for ((r, a), b) in bn.running_mean().iter().zip(mean).zip(m2) {
            let expected = (0.99 * 0.01 * a + 0.01 * b) / (1.0 - 0.99f64.powi(2));
            assert!((r - expected).abs() < 1e-9);
        }
    }
}

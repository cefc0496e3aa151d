use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::layer::{backward_layer, forward_layer, Activation, Layer, Scratch};
use super::tensor::Tensor;
use crate::error::{Error, Result};

/// Feed-forward stack of layers with at most one auxiliary-input junction.
///
/// Layer shapes are checked once at construction; forward and backward only
/// validate the tensors handed to them.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    input_shape: Vec<usize>,
    aux_len: Option<usize>,
    layers: Vec<Layer>,
    // shapes[i] is the per-sample input shape of layer i; shapes[len] is the output.
    shapes: Vec<Vec<usize>>,
}

/// Activations retained by a forward pass, consumed by [`Network::backward`].
///
/// A cache can be reused across batches through [`Network::forward_into`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Cache {
    batch: usize,
    activations: Vec<Vec<f64>>,
    scratch: Vec<Scratch>,
}

impl Cache {
    pub fn batch(&self) -> usize {
        self.batch
    }

    /// Network output of the last forward pass, `batch` samples back to back.
    pub fn output(&self) -> &[f64] {
        self.activations.last().map_or(&[], |v| v.as_slice())
    }

    /// True when both passes took the same branch at every ReLU and max-pool.
    pub fn same_branches(&self, other: &Cache, net: &Network) -> bool {
        if self.batch != other.batch || self.activations.len() != other.activations.len() {
            return false;
        }
        net.layers.iter().enumerate().all(|(i, layer)| match layer {
            Layer::Activation(Activation::Relu) => self.activations[i]
                .iter()
                .zip(&other.activations[i])
                .all(|(a, b)| (*a > 0.0) == (*b > 0.0)),
            Layer::MaxPool2d { .. } => self.scratch[i] == other.scratch[i],
            _ => true,
        })
    }
}

/// Gradients of a scalar loss, one tensor per parameter tensor (in
/// [`Network::params`] order), plus the input and auxiliary gradients.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub params: Vec<Tensor>,
    pub input: Option<Tensor>,
    pub aux: Option<Tensor>,
}

/// Reusable backward-pass buffers.
#[derive(Debug, Clone, Default)]
pub struct Workspace {
    dy: Vec<f64>,
    dx: Vec<f64>,
    cols: Vec<f64>,
    dcols: Vec<f64>,
}

impl Network {
    pub fn new(input_shape: Vec<usize>, layers: Vec<Layer>) -> Result<Self> {
        if input_shape.is_empty() || input_shape.contains(&0) {
            return Err(Error::ShapeMismatch(format!("invalid input shape {input_shape:?}")));
        }
        let mut shapes = vec![input_shape.clone()];
        let mut aux_len = None;
        for layer in &layers {
            if let Layer::Concat { aux_len: n } = layer {
                if aux_len.replace(*n).is_some() {
                    return Err(Error::ShapeMismatch("more than one concat junction".into()));
                }
            }
            let next = layer.output_shape(shapes.last().unwrap())?;
            shapes.push(next);
        }
        Ok(Self {
            input_shape,
            aux_len,
            layers,
            shapes,
        })
    }

    /// Glorot-uniform initialization from a seed.
    pub fn init(&mut self, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for layer in &mut self.layers {
            layer.init(&mut rng);
        }
    }

    pub fn input_shape(&self) -> &[usize] {
        &self.input_shape
    }

    pub fn output_shape(&self) -> &[usize] {
        self.shapes.last().unwrap()
    }

    pub fn aux_len(&self) -> Option<usize> {
        self.aux_len
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    /// Per-sample shape entering each layer, followed by the output shape.
    pub fn shapes(&self) -> &[Vec<usize>] {
        &self.shapes
    }

    pub fn params(&self) -> Vec<&Tensor> {
        self.layers.iter().flat_map(|l| l.params()).collect()
    }

    pub fn params_mut(&mut self) -> Vec<&mut Tensor> {
        self.layers.iter_mut().flat_map(|l| l.params_mut()).collect()
    }

    /// `layer{i}.weight` / `layer{i}.bias`, aligned with [`Network::params`].
    pub fn param_names(&self) -> Vec<String> {
        self.layers
            .iter()
            .enumerate()
            .flat_map(|(i, l)| {
                let n = l.params().len();
                ["weight", "bias"][..n].iter().map(move |s| format!("layer{i}.{s}"))
            })
            .collect()
    }

    pub fn parameter_count(&self) -> usize {
        self.params().iter().map(|t| t.len()).sum()
    }

    pub fn zero_gradients(&self) -> Vec<Tensor> {
        self.params().iter().map(|t| Tensor::zeros(t.shape())).collect()
    }

    fn sample_len(&self) -> usize {
        self.input_shape.iter().product()
    }

    /// Single-sample forward pass. `input` has the network's input shape.
    pub fn forward(&self, input: &Tensor, aux: Option<&Tensor>) -> Result<(Tensor, Cache)> {
        if input.shape() != self.input_shape.as_slice() {
            return Err(Error::ShapeMismatch(format!(
                "network expects input {:?}, got {:?}",
                self.input_shape,
                input.shape()
            )));
        }
        let (y, cache) = self.forward_batch(1, input.data(), aux.map(|a| a.data()))?;
        Ok((y.reshape(self.output_shape().to_vec())?, cache))
    }

    /// Batched forward pass over `batch` samples stored back to back.
    /// Returns a `(batch, output...)` tensor.
    pub fn forward_batch(
        &self,
        batch: usize,
        input: &[f64],
        aux: Option<&[f64]>,
    ) -> Result<(Tensor, Cache)> {
        self.check_inputs(batch, input, aux)?;
        let mut cache = Cache::default();
        self.run_forward(batch, input, aux, &mut cache);
        let mut shape = vec![batch];
        shape.extend_from_slice(self.output_shape());
        let out = Tensor::new(shape, cache.output().to_vec())?;
        Ok((out, cache))
    }

    /// Like [`Network::forward_batch`], but reuses the buffers of `cache`.
    /// The output is available from [`Cache::output`].
    pub fn forward_into(
        &self,
        batch: usize,
        input: &[f64],
        aux: Option<&[f64]>,
        cache: &mut Cache,
    ) -> Result<()> {
        self.check_inputs(batch, input, aux)?;
        self.run_forward(batch, input, aux, cache);
        Ok(())
    }

    fn run_forward(&self, batch: usize, input: &[f64], aux: Option<&[f64]>, cache: &mut Cache) {
        let n = self.layers.len();
        cache.batch = batch;
        cache.activations.resize_with(n + 1, Vec::new);
        cache.activations.truncate(n + 1);
        cache.scratch.resize_with(n, Scratch::default);
        cache.scratch.truncate(n);
        cache.activations[0].clear();
        cache.activations[0].extend_from_slice(input);
        for (i, layer) in self.layers.iter().enumerate() {
            let (done, rest) = cache.activations.split_at_mut(i + 1);
            forward_layer(
                layer,
                &self.shapes[i],
                &self.shapes[i + 1],
                batch,
                &done[i],
                aux,
                &mut rest[0],
                &mut cache.scratch[i],
            );
        }
    }

    fn check_inputs(&self, batch: usize, input: &[f64], aux: Option<&[f64]>) -> Result<()> {
        if batch == 0 || input.len() != batch * self.sample_len() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} samples of {:?} ({} values), got {} values",
                batch,
                self.input_shape,
                batch * self.sample_len(),
                input.len()
            )));
        }
        match (self.aux_len, aux) {
            (Some(n), Some(a)) if a.len() == batch * n => Ok(()),
            (None, None) => Ok(()),
            (Some(n), _) => Err(Error::ShapeMismatch(format!(
                "network needs an auxiliary vector of {n} per sample"
            ))),
            (None, Some(_)) => Err(Error::ShapeMismatch("network takes no auxiliary input".into())),
        }
    }

    /// Backpropagates `loss_grad` (gradient of the loss w.r.t. the forward
    /// output) through a matching cache.
    pub fn backward(&self, cache: &Cache, loss_grad: &Tensor) -> Result<Gradients> {
        let mut grads = self.zero_gradients();
        let mut work = Workspace::default();
        let (dinput, daux) = self.run_backward(cache, loss_grad.data(), &mut grads, &mut work, true)?;
        let batch_shape = |shape: &[usize]| {
            let mut s = vec![cache.batch];
            s.extend_from_slice(shape);
            if cache.batch == 1 {
                s.remove(0);
            }
            s
        };
        Ok(Gradients {
            params: grads,
            input: dinput
                .map(|d| Tensor::new(batch_shape(&self.input_shape), d))
                .transpose()?,
            aux: daux
                .map(|d| Tensor::new(batch_shape(&[self.aux_len.unwrap_or(0)]), d))
                .transpose()?,
        })
    }

    /// Parameter gradients only; skips the input gradient of the first layer.
    pub fn backward_params(&self, cache: &Cache, loss_grad: &[f64]) -> Result<Vec<Tensor>> {
        let mut grads = self.zero_gradients();
        self.backward_into(cache, loss_grad, &mut grads, &mut Workspace::default())?;
        Ok(grads)
    }

    /// Overwrites `grads` (shaped as [`Network::zero_gradients`]) with the
    /// parameter gradients, reusing the buffers in `work`.
    pub fn backward_into(
        &self,
        cache: &Cache,
        loss_grad: &[f64],
        grads: &mut [Tensor],
        work: &mut Workspace,
    ) -> Result<()> {
        let params = self.params();
        if grads.len() != params.len() || grads.iter().zip(&params).any(|(g, p)| g.shape() != p.shape()) {
            return Err(Error::ShapeMismatch("gradient buffers do not match parameters".into()));
        }
        for g in grads.iter_mut() {
            g.fill(0.0);
        }
        self.run_backward(cache, loss_grad, grads, work, false)?;
        Ok(())
    }

    fn run_backward(
        &self,
        cache: &Cache,
        loss_grad: &[f64],
        grads: &mut [Tensor],
        work: &mut Workspace,
        need_input: bool,
    ) -> Result<(Option<Vec<f64>>, Option<Vec<f64>>)> {
        self.check_cache(cache)?;
        let out_len: usize = self.output_shape().iter().product();
        if loss_grad.len() != cache.batch * out_len {
            return Err(Error::ShapeMismatch(format!(
                "loss gradient has {} values, expected {}",
                loss_grad.len(),
                cache.batch * out_len
            )));
        }

        let mut offsets = Vec::with_capacity(self.layers.len());
        let mut at = 0;
        for layer in &self.layers {
            offsets.push(at);
            at += layer.params().len();
        }

        let Workspace { dy, dx, cols, dcols } = work;
        dy.clear();
        dy.extend_from_slice(loss_grad);
        let mut daux = None;
        let mut dinput = None;
        for i in (0..self.layers.len()).rev() {
            let layer = &self.layers[i];
            let n_params = layer.params().len();
            let want_input = need_input || i > 0 && self.needs_grad_below(i);
            backward_layer(
                layer,
                &self.shapes[i],
                &self.shapes[i + 1],
                cache.batch,
                &cache.activations[i],
                &cache.activations[i + 1],
                &cache.scratch[i],
                dy,
                &mut grads[offsets[i]..offsets[i] + n_params],
                want_input.then_some(&mut *dx),
                &mut daux,
                cols,
                dcols,
            );
            if !want_input {
                break;
            }
            std::mem::swap(dy, dx);
            if i == 0 {
                dinput = Some(dy.clone());
            }
        }
        Ok((dinput, daux))
    }

    // Whether any layer at or below `i - 1` has parameters.
    fn needs_grad_below(&self, i: usize) -> bool {
        self.layers[..i].iter().any(|l| !l.params().is_empty())
    }

    fn check_cache(&self, cache: &Cache) -> Result<()> {
        let stale = |why: &str| Err(Error::StaleCache(why.to_string()));
        if cache.activations.len() != self.layers.len() + 1 || cache.scratch.len() != self.layers.len() {
            return stale("layer count differs from network");
        }
        for (i, act) in cache.activations.iter().enumerate() {
            let n: usize = self.shapes[i].iter().product();
            if act.len() != cache.batch * n {
                return stale(&format!("activation {i} has {} values, expected {}", act.len(), cache.batch * n));
            }
        }
        Ok(())
    }

    /// Predictions for a batch of samples.
    pub fn predict_batch(&self, batch: usize, input: &[f64], aux: Option<&[f64]>) -> Result<Vec<f64>> {
        Ok(self.forward_batch(batch, input, aux)?.0.into_data())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_forward_by_hand() {
        let mut layer = Layer::dense(2, 1);
        if let Layer::Dense { weight, .. } = &mut layer {
            weight.data_mut().copy_from_slice(&[1.0, 1.0]);
        }
        let net = Network::new(vec![2], vec![layer]).unwrap();
        let (y, _) = net.forward(&Tensor::from_vec(vec![3.0, 4.0]), None).unwrap();
        assert_eq!(y.data(), &[7.0]);
    }

    #[test]
    fn conv_forward_by_hand() {
        let mut layer = Layer::conv2d(1, 1, 2, 2);
        if let Layer::Conv2d { weight, .. } = &mut layer {
            weight.fill(1.0);
        }
        let net = Network::new(vec![1, 3, 3], vec![layer]).unwrap();
        let x = Tensor::new(vec![1, 3, 3], vec![1.0; 9]).unwrap();
        let (y, _) = net.forward(&x, None).unwrap();
        assert_eq!(y.shape(), &[1, 2, 2]);
        assert_eq!(y.data(), &[4.0; 4]);
    }

    #[test]
    fn maxpool_forward_and_odd_dims() {
        let net = Network::new(vec![1, 2, 2], vec![Layer::MaxPool2d { ph: 2, pw: 2 }]).unwrap();
        let x = Tensor::new(vec![1, 2, 2], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(net.forward(&x, None).unwrap().0.data(), &[4.0]);

        let net = Network::new(vec![1, 3, 5], vec![Layer::MaxPool2d { ph: 2, pw: 2 }]).unwrap();
        assert_eq!(net.output_shape(), &[1, 1, 2]);
        let x = Tensor::new(vec![1, 3, 5], (0..15).map(|v| v as f64).collect()).unwrap();
        // trailing row and column are dropped
        assert_eq!(net.forward(&x, None).unwrap().0.data(), &[6.0, 8.0]);
    }

    #[test]
    fn illegal_compositions_rejected_at_construction() {
        assert!(matches!(
            Network::new(vec![10], vec![Layer::dense(9, 3)]),
            Err(Error::ShapeMismatch(_))
        ));
        assert!(Network::new(vec![1, 4, 4], vec![Layer::conv2d(1, 2, 5, 5)]).is_err());
        assert!(Network::new(vec![1, 4, 4], vec![Layer::conv2d(1, 2, 3, 3), Layer::dense(8, 1)]).is_err());
        assert!(Network::new(
            vec![3],
            vec![Layer::Concat { aux_len: 1 }, Layer::Concat { aux_len: 1 }]
        )
        .is_err());
    }

    #[test]
    fn aux_presence_is_checked() {
        let net = Network::new(vec![2], vec![Layer::Concat { aux_len: 3 }, Layer::dense(5, 1)]).unwrap();
        let x = Tensor::from_vec(vec![1.0, 2.0]);
        assert!(matches!(net.forward(&x, None), Err(Error::ShapeMismatch(_))));
        let aux = Tensor::from_vec(vec![0.0; 3]);
        assert!(net.forward(&x, Some(&aux)).is_ok());
        let plain = Network::new(vec![2], vec![Layer::dense(2, 1)]).unwrap();
        assert!(plain.forward(&x, Some(&aux)).is_err());
    }

    #[test]
    fn zero_loss_grad_gives_zero_gradients() {
        let mut net = Network::new(
            vec![1, 4, 4],
            vec![
                Layer::conv2d(1, 2, 2, 2),
                Layer::Activation(Activation::Relu),
                Layer::Flatten,
                Layer::dense(18, 1),
            ],
        )
        .unwrap();
        net.init(3);
        let x = Tensor::new(vec![1, 4, 4], (0..16).map(|v| v as f64 / 16.0).collect()).unwrap();
        let (_, cache) = net.forward(&x, None).unwrap();
        let g = net.backward(&cache, &Tensor::zeros(&[1])).unwrap();
        assert!(g.params.iter().all(|t| t.data().iter().all(|&v| v == 0.0)));
        assert!(g.input.unwrap().data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn relu_blocks_negative_preactivation() {
        let mut layer = Layer::dense(1, 1);
        if let Layer::Dense { weight, .. } = &mut layer {
            weight.data_mut()[0] = 1.0;
        }
        let net = Network::new(vec![1], vec![layer, Layer::Activation(Activation::Relu)]).unwrap();
        let (_, cache) = net.forward(&Tensor::from_vec(vec![-2.0]), None).unwrap();
        let g = net.backward(&cache, &Tensor::scalar(1.0)).unwrap();
        assert_eq!(g.params[0].data(), &[0.0]);
        assert_eq!(g.params[1].data(), &[0.0]);
        assert_eq!(g.input.unwrap().data(), &[0.0]);
    }

    #[test]
    fn stale_cache_detected() {
        let a = Network::new(vec![2], vec![Layer::dense(2, 1)]).unwrap();
        let b = Network::new(vec![2], vec![Layer::dense(2, 2), Layer::dense(2, 1)]).unwrap();
        let (_, cache) = a.forward(&Tensor::from_vec(vec![1.0, 1.0]), None).unwrap();
        assert!(matches!(b.backward(&cache, &Tensor::scalar(1.0)), Err(Error::StaleCache(_))));
    }

    #[test]
    fn batch_matches_single_samples() {
        let mut net = Network::new(
            vec![1, 5, 5],
            vec![
                Layer::conv2d(1, 3, 2, 2),
                Layer::Activation(Activation::Tanh),
                Layer::MaxPool2d { ph: 2, pw: 2 },
                Layer::Flatten,
                Layer::Concat { aux_len: 2 },
                Layer::dense(14, 4),
                Layer::Activation(Activation::Relu),
                Layer::dense(4, 1),
            ],
        )
        .unwrap();
        net.init(11);
        let xs: Vec<f64> = (0..75).map(|i| ((i * 7 % 13) as f64 - 6.0) / 6.0).collect();
        let aux: Vec<f64> = (0..6).map(|i| i as f64 * 0.1).collect();
        let batched = net.predict_batch(3, &xs, Some(&aux)).unwrap();
        for b in 0..3 {
            let single = net.predict_batch(1, &xs[b * 25..(b + 1) * 25], Some(&aux[b * 2..b * 2 + 2])).unwrap();
            assert!((single[0] - batched[b]).abs() < 1e-14);
        }
    }
}

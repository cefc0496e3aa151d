//! Shared test helpers: bundled corpus loading and a central-difference
//! gradient oracle that only uses the forward pass.

#![allow(dead_code)]

use std::path::PathBuf;

use aerofoil::geometry::{load_geometry, AirfoilGeometry};
use aerofoil::net::{Network, Tensor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const FD_STEP: f64 = 1e-5;
pub const FD_TOLERANCE: f64 = 1e-4;

pub fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn corpus_dir() -> PathBuf {
    manifest_dir().join("data/airfoils")
}

pub fn fixture(name: &str) -> PathBuf {
    manifest_dir().join("tests/fixtures").join(name)
}

/// Every bundled airfoil, in file-name order.
pub fn corpus() -> Vec<AirfoilGeometry> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| load_geometry(&std::fs::read_to_string(p).unwrap()).unwrap())
        .collect()
}

pub fn corpus_airfoil(name: &str) -> AirfoilGeometry {
    corpus().into_iter().find(|g| g.name == name).unwrap()
}

/// Scalar probe loss `sum_i w_i * y_i` over the batched output.
pub struct Probe {
    pub batch: usize,
    pub input: Vec<f64>,
    pub aux: Option<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl Probe {
    pub fn random(net: &Network, batch: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n: usize = net.input_shape().iter().product();
        let out: usize = net.output_shape().iter().product();
        Self {
            batch,
            input: (0..batch * n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            aux: net.aux_len().map(|a| (0..batch * a).map(|_| rng.gen_range(-1.0..1.0)).collect()),
            weights: (0..batch * out).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        }
    }

    pub fn loss(&self, net: &Network) -> f64 {
        let y = net.predict_batch(self.batch, &self.input, self.aux.as_deref()).unwrap();
        y.iter().zip(&self.weights).map(|(a, b)| a * b).sum()
    }

    fn value_mut(&mut self, aux: bool, k: usize) -> &mut f64 {
        if aux {
            &mut self.aux.as_mut().unwrap()[k]
        } else {
            &mut self.input[k]
        }
    }

    fn loss_with_cache(&self, net: &Network) -> (f64, aerofoil::net::Cache) {
        let (y, cache) = net.forward_batch(self.batch, &self.input, self.aux.as_deref()).unwrap();
        (y.data().iter().zip(&self.weights).map(|(a, b)| a * b).sum(), cache)
    }
}

#[derive(Debug, Default)]
pub struct GradCheck {
    pub checked: usize,
    /// Perturbations that crossed a ReLU or max-pool switch and were resampled.
    pub skipped: usize,
    pub max_rel_error: f64,
    pub worst: String,
}

pub fn rel_error(a: f64, n: f64) -> f64 {
    (a - n).abs() / a.abs().max(n.abs()).max(1e-6)
}

/// Compares backprop parameter gradients with central differences on
/// `count` randomly chosen parameters, cycling over every parameter tensor.
pub fn check_parameters(net: &mut Network, probe: &Probe, count: usize, seed: u64) -> GradCheck {
    let (_, base_cache) = probe.loss_with_cache(net);
    let grad_out = Tensor::new(vec![probe.weights.len()], probe.weights.clone()).unwrap();
    let analytic = net.backward(&base_cache, &grad_out).unwrap().params;
    let names = net.param_names();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = GradCheck::default();
    let tensors = analytic.len();
    let mut attempts = 0;
    while report.checked < count {
        attempts += 1;
        assert!(attempts < count * 20, "too many kinked perturbations");
        let t = report.checked % tensors;
        let k = rng.gen_range(0..analytic[t].len());
        let original = net.params()[t].data()[k];

        net.params_mut()[t].data_mut()[k] = original + FD_STEP;
        let (plus, plus_cache) = probe.loss_with_cache(net);
        net.params_mut()[t].data_mut()[k] = original - FD_STEP;
        let (minus, minus_cache) = probe.loss_with_cache(net);
        net.params_mut()[t].data_mut()[k] = original;

        if !plus_cache.same_branches(&base_cache, net) || !minus_cache.same_branches(&base_cache, net) {
            report.skipped += 1;
            continue;
        }
        let numeric = (plus - minus) / (2.0 * FD_STEP);
        let a = analytic[t].data()[k];
        let err = rel_error(a, numeric);
        if err > report.max_rel_error {
            report.max_rel_error = err;
            report.worst = format!("{}[{k}]: backprop {a:e} vs fd {numeric:e}", names[t]);
        }
        report.checked += 1;
    }
    report
}

/// Same check for the input and auxiliary gradients.
pub fn check_inputs(net: &Network, probe: &Probe, count: usize, seed: u64) -> GradCheck {
    let (_, base_cache) = probe.loss_with_cache(net);
    let grad_out = Tensor::new(vec![probe.weights.len()], probe.weights.clone()).unwrap();
    let g = net.backward(&base_cache, &grad_out).unwrap();
    let input_grad = g.input.unwrap().into_data();
    let aux_grad = g.aux.map(|t| t.into_data());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = GradCheck::default();
    let mut p = Probe {
        batch: probe.batch,
        input: probe.input.clone(),
        aux: probe.aux.clone(),
        weights: probe.weights.clone(),
    };
    let mut attempts = 0;
    while report.checked < count {
        attempts += 1;
        assert!(attempts < count * 20, "too many kinked perturbations");
        let use_aux = aux_grad.is_some() && report.checked % 4 == 3;
        let (len, analytic) = if use_aux {
            (p.aux.as_ref().unwrap().len(), aux_grad.as_ref().unwrap())
        } else {
            (p.input.len(), &input_grad)
        };
        let k = rng.gen_range(0..len);
        let original = *p.value_mut(use_aux, k);
        *p.value_mut(use_aux, k) = original + FD_STEP;
        let (plus, plus_cache) = p.loss_with_cache(net);
        *p.value_mut(use_aux, k) = original - FD_STEP;
        let (minus, minus_cache) = p.loss_with_cache(net);
        *p.value_mut(use_aux, k) = original;
        if !plus_cache.same_branches(&base_cache, net) || !minus_cache.same_branches(&base_cache, net) {
            report.skipped += 1;
            continue;
        }
        let numeric = (plus - minus) / (2.0 * FD_STEP);
        let err = rel_error(analytic[k], numeric);
        if err > report.max_rel_error {
            report.max_rel_error = err;
            report.worst = format!("{}[{k}]: backprop {:e} vs fd {numeric:e}", if use_aux { "aux" } else { "input" }, analytic[k]);
        }
        report.checked += 1;
    }
    report
}

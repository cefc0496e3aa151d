//! Backprop against central finite differences on the three presets.
//!
//! ```text
//! cargo run --release --example gradient_check
//! ```

use aerofoil::net::{Activation, Architecture, Tensor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const H: f64 = 1e-5;

fn main() -> aerofoil::Result<()> {
    for arch in Architecture::ALL {
        let mut net = arch.build(Activation::Tanh, 42);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n: usize = net.input_shape().iter().product();
        let input: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let aux: Option<Vec<f64>> = net.aux_len().map(|a| (0..a).map(|_| rng.gen_range(-1.0..1.0)).collect());

        // loss = prediction, so d loss / d output = 1
        let (_, cache) = net.forward_batch(1, &input, aux.as_deref())?;
        let grads = net.backward(&cache, &Tensor::new(vec![1], vec![1.0])?)?.params;

        let mut worst: f64 = 0.0;
        for _ in 0..50 {
            let t = rng.gen_range(0..grads.len());
            let k = rng.gen_range(0..grads[t].len());
            let original = net.params()[t].data()[k];
            net.params_mut()[t].data_mut()[k] = original + H;
            let plus = net.predict_batch(1, &input, aux.as_deref())?[0];
            net.params_mut()[t].data_mut()[k] = original - H;
            let minus = net.predict_batch(1, &input, aux.as_deref())?[0];
            net.params_mut()[t].data_mut()[k] = original;
            let numeric = (plus - minus) / (2.0 * H);
            let analytic = grads[t].data()[k];
            worst = worst.max((analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-6));
        }
        println!("{:<9} {:>9} params, worst relative error over 50 samples {worst:.2e}", arch.to_string(), net.parameter_count());
    }
    Ok(())
}

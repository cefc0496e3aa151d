use std::fmt;
use std::str::FromStr;

use rand::Rng;

use super::gemm::gemm;
use super::tensor::Tensor;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Relu,
    Tanh,
    Identity,
}

impl Activation {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Relu => x.max(0.0),
            Activation::Tanh => x.tanh(),
            Activation::Identity => x,
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Activation::Relu => "relu",
            Activation::Tanh => "tanh",
            Activation::Identity => "identity",
        })
    }
}

impl FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "relu" => Ok(Activation::Relu),
            "tanh" => Ok(Activation::Tanh),
            "identity" => Ok(Activation::Identity),
            other => Err(Error::InvalidConfig(format!("unknown activation {other:?}"))),
        }
    }
}

/// One stage of a feed-forward network. Shapes exclude the batch dimension.
#[derive(Debug, Clone, PartialEq)]
pub enum Layer {
    /// Weight `(out, in)`, bias `(out)`.
    Dense { weight: Tensor, bias: Tensor },
    /// Stride 1, no padding. Weight `(out_ch, in_ch, kh, kw)`, bias `(out_ch)`.
    Conv2d { weight: Tensor, bias: Tensor },
    /// Non-overlapping windows; trailing rows/columns that do not fill a
    /// window are dropped.
    MaxPool2d { ph: usize, pw: usize },
    Activation(Activation),
    Flatten,
    /// Appends the auxiliary input vector to a flat activation.
    Concat { aux_len: usize },
}

impl Layer {
    pub fn dense(inputs: usize, outputs: usize) -> Self {
        Layer::Dense {
            weight: Tensor::zeros(&[outputs, inputs]),
            bias: Tensor::zeros(&[outputs]),
        }
    }

    pub fn conv2d(in_ch: usize, out_ch: usize, kh: usize, kw: usize) -> Self {
        Layer::Conv2d {
            weight: Tensor::zeros(&[out_ch, in_ch, kh, kw]),
            bias: Tensor::zeros(&[out_ch]),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Layer::Dense { weight, .. } => {
                format!("dense({}->{})", weight.shape()[1], weight.shape()[0])
            }
            Layer::Conv2d { weight, .. } => {
                let s = weight.shape();
                format!("conv2d({}->{}, {}x{})", s[1], s[0], s[2], s[3])
            }
            Layer::MaxPool2d { ph, pw } => format!("maxpool({ph}x{pw})"),
            Layer::Activation(a) => a.to_string(),
            Layer::Flatten => "flatten".into(),
            Layer::Concat { aux_len } => format!("concat(+{aux_len})"),
        }
    }

    pub fn params(&self) -> Vec<&Tensor> {
        match self {
            Layer::Dense { weight, bias } | Layer::Conv2d { weight, bias } => vec![weight, bias],
            _ => Vec::new(),
        }
    }

    pub fn params_mut(&mut self) -> Vec<&mut Tensor> {
        match self {
            Layer::Dense { weight, bias } | Layer::Conv2d { weight, bias } => vec![weight, bias],
            _ => Vec::new(),
        }
    }

    /// Glorot-uniform weights, zero biases.
    pub(crate) fn init<R: Rng>(&mut self, rng: &mut R) {
        let (fan_in, fan_out) = match self {
            Layer::Dense { weight, .. } => (weight.shape()[1], weight.shape()[0]),
            Layer::Conv2d { weight, .. } => {
                let s = weight.shape();
                (s[1] * s[2] * s[3], s[0] * s[2] * s[3])
            }
            _ => return,
        };
        let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
        if let Layer::Dense { weight, bias } | Layer::Conv2d { weight, bias } = self {
            for w in weight.data_mut() {
                *w = rng.gen_range(-limit..=limit);
            }
            bias.fill(0.0);
        }
    }

    /// Per-sample output shape, or `ShapeMismatch` if `input` is incompatible.
    pub(crate) fn output_shape(&self, input: &[usize]) -> Result<Vec<usize>> {
        let mismatch = |why: String| Err(Error::ShapeMismatch(format!("{}: {why}", self.name())));
        match self {
            Layer::Dense { weight, .. } => {
                let n: usize = input.iter().product();
                if input.len() != 1 || n != weight.shape()[1] {
                    return mismatch(format!("expects flat input of {}, got {input:?}", weight.shape()[1]));
                }
                Ok(vec![weight.shape()[0]])
            }
            Layer::Conv2d { weight, .. } => {
                let s = weight.shape();
                match *input {
                    [c, h, w] if c == s[1] && h >= s[2] && w >= s[3] => {
                        Ok(vec![s[0], h - s[2] + 1, w - s[3] + 1])
                    }
                    _ => mismatch(format!("kernel {s:?} cannot slide over {input:?}")),
                }
            }
            Layer::MaxPool2d { ph, pw } => match *input {
                [c, h, w] if *ph >= 1 && *pw >= 1 && h >= *ph && w >= *pw => {
                    Ok(vec![c, h / ph, w / pw])
                }
                _ => mismatch(format!("cannot pool {input:?}")),
            },
            Layer::Activation(_) => Ok(input.to_vec()),
            Layer::Flatten => Ok(vec![input.iter().product()]),
            Layer::Concat { aux_len } => {
                if input.len() != 1 {
                    return mismatch(format!("expects flat input, got {input:?}"));
                }
                Ok(vec![input[0] + aux_len])
            }
        }
    }
}

/// Per-layer state retained by the forward pass.
#[derive(Debug, Clone, PartialEq, Default)]
pub(crate) enum Scratch {
    #[default]
    None,
    /// im2col buffer for one sample, `(K, P)`.
    Patches(Vec<f64>),
    /// Flat input index of each pooled maximum.
    Argmax(Vec<usize>),
}

// Sets the length without clearing old contents; for outputs that are
// overwritten in full.
fn fit_len<T: Copy + Default>(v: &mut Vec<T>, n: usize) {
    v.truncate(n);
    v.resize(n, T::default());
}

// Resizes without releasing capacity; buffers are reused across batches.
fn reset(v: &mut Vec<f64>, n: usize) {
    v.clear();
    v.resize(n, 0.0);
}

/// Batched forward for one layer. `x` holds `batch` samples of `in_shape`;
/// the result is written to `y`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn forward_layer(
    layer: &Layer,
    in_shape: &[usize],
    out_shape: &[usize],
    batch: usize,
    x: &[f64],
    aux: Option<&[f64]>,
    y: &mut Vec<f64>,
    scratch: &mut Scratch,
) {
    let out_len: usize = out_shape.iter().product();
    match layer {
        Layer::Dense { weight, bias } => {
            let (out, inp) = (weight.shape()[0], weight.shape()[1]);
            y.clear();
            for _ in 0..batch {
                y.extend_from_slice(bias.data());
            }
            gemm(batch, inp, out, x, false, weight.data(), true, 1.0, y);
        }
        Layer::Conv2d { weight, bias } => {
            let s = weight.shape();
            let (oc, kh, kw) = (s[0], s[2], s[3]);
            let k = s[1] * kh * kw;
            let (oh, ow) = (out_shape[1], out_shape[2]);
            let p = oh * ow;
            let in_len: usize = in_shape.iter().product();
            if !matches!(scratch, Scratch::Patches(_)) {
                *scratch = Scratch::Patches(Vec::new());
            }
            let Scratch::Patches(patches) = scratch else { unreachable!() };
            reset(patches, k * p);
            fit_len(y, batch * out_len);
            for b in 0..batch {
                let cols = &mut patches[..];
                im2col(&x[b * in_len..(b + 1) * in_len], in_shape, kh, kw, oh, ow, cols);
                let yb = &mut y[b * out_len..(b + 1) * out_len];
                for (c, row) in yb.chunks_mut(p).enumerate() {
                    row.fill(bias.data()[c]);
                }
                gemm(oc, k, p, weight.data(), false, cols, false, 1.0, yb);
            }
        }
        Layer::MaxPool2d { ph, pw } => {
            let (c, h, w) = (in_shape[0], in_shape[1], in_shape[2]);
            let (oh, ow) = (out_shape[1], out_shape[2]);
            let in_len = c * h * w;
            if !matches!(scratch, Scratch::Argmax(_)) {
                *scratch = Scratch::Argmax(Vec::new());
            }
            let Scratch::Argmax(arg) = scratch else { unreachable!() };
            fit_len(arg, batch * out_len);
            fit_len(y, batch * out_len);
            let (ph, pw) = (*ph, *pw);
            let planes = y.chunks_mut(oh * ow).zip(arg.chunks_mut(oh * ow));
            for (p, (yp, ap)) in planes.enumerate() {
                let base = (p / c) * in_len + (p % c) * h * w;
                let plane = &x[base..base + h * w];
                if ph == 2 && pw == 2 {
                    pool_2x2(plane, w, ow, base, yp, ap);
                    continue;
                }
                for (oy, (yr, ar)) in yp.chunks_mut(ow).zip(ap.chunks_mut(ow)).enumerate() {
                    for (ox, (yv, av)) in yr.iter_mut().zip(ar.iter_mut()).enumerate() {
                        let mut best = oy * ph * w + ox * pw;
                        let mut best_v = plane[best];
                        for i in 0..ph {
                            let row = (oy * ph + i) * w + ox * pw;
                            for (j, &v) in plane[row..row + pw].iter().enumerate() {
                                let better = v > best_v;
                                best = if better { row + j } else { best };
                                best_v = if better { v } else { best_v };
                            }
                        }
                        *yv = best_v;
                        *av = base + best;
                    }
                }
            }
        }
        Layer::Activation(a) => {
            y.clear();
            match a {
                Activation::Relu => y.extend(x.iter().map(|&v| v.max(0.0))),
                Activation::Tanh => y.extend(x.iter().map(|&v| v.tanh())),
                Activation::Identity => y.extend_from_slice(x),
            }
        }
        Layer::Flatten => {
            y.clear();
            y.extend_from_slice(x);
        }
        Layer::Concat { aux_len } => {
            let aux = aux.expect("concat without auxiliary input");
            let n = in_shape[0];
            y.clear();
            for b in 0..batch {
                y.extend_from_slice(&x[b * n..(b + 1) * n]);
                y.extend_from_slice(&aux[b * aux_len..(b + 1) * aux_len]);
            }
        }
    }
}

/// Batched backward for one layer. Parameter gradients accumulate into
/// `param_grads`; the input gradient is written to `dx` when given, and a
/// concat junction writes its auxiliary gradient to `daux`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn backward_layer(
    layer: &Layer,
    in_shape: &[usize],
    out_shape: &[usize],
    batch: usize,
    x: &[f64],
    y: &[f64],
    scratch: &Scratch,
    dy: &[f64],
    param_grads: &mut [Tensor],
    dx: Option<&mut Vec<f64>>,
    daux: &mut Option<Vec<f64>>,
    cols: &mut Vec<f64>,
    dcols: &mut Vec<f64>,
) {
    let in_len: usize = in_shape.iter().product();
    let out_len: usize = out_shape.iter().product();
    match layer {
        Layer::Dense { weight, .. } => {
            let (out, inp) = (weight.shape()[0], weight.shape()[1]);
            let (gw, gb) = param_grads.split_at_mut(1);
            gemm(out, batch, inp, dy, true, x, false, 1.0, gw[0].data_mut());
            let gb = gb[0].data_mut();
            for row in dy.chunks(out) {
                for (g, d) in gb.iter_mut().zip(row) {
                    *g += d;
                }
            }
            if let Some(dx) = dx {
                reset(dx, batch * inp);
                gemm(batch, out, inp, dy, false, weight.data(), false, 0.0, dx);
            }
        }
        Layer::Conv2d { weight, .. } => {
            let s = weight.shape();
            let (oc, kh, kw) = (s[0], s[2], s[3]);
            let k = s[1] * kh * kw;
            let (oh, ow) = (out_shape[1], out_shape[2]);
            let p = oh * ow;
            let (gw, gb) = param_grads.split_at_mut(1);
            let mut dx = dx;
            if let Some(dx) = dx.as_deref_mut() {
                reset(dx, batch * in_len);
                reset(dcols, k * p);
            }
            // Patches are rebuilt per sample; keeping them for the whole
            // batch costs more in memory traffic than the rebuild.
            reset(cols, k * p);
            for b in 0..batch {
                im2col(&x[b * in_len..(b + 1) * in_len], in_shape, kh, kw, oh, ow, cols);
                let dyb = &dy[b * out_len..(b + 1) * out_len];
                gemm(oc, p, k, dyb, false, cols, true, 1.0, gw[0].data_mut());
                for (g, row) in gb[0].data_mut().iter_mut().zip(dyb.chunks(p)) {
                    *g += row.iter().sum::<f64>();
                }
                if let Some(dx) = dx.as_deref_mut() {
                    gemm(k, oc, p, weight.data(), true, dyb, false, 0.0, dcols);
                    col2im(dcols, in_shape, kh, kw, oh, ow, &mut dx[b * in_len..(b + 1) * in_len]);
                }
            }
        }
        Layer::MaxPool2d { .. } => {
            let Scratch::Argmax(arg) = scratch else {
                unreachable!("pool cache without argmax")
            };
            if let Some(dx) = dx {
                reset(dx, batch * in_len);
                for (&i, &d) in arg.iter().zip(dy) {
                    dx[i] += d;
                }
            }
        }
        Layer::Activation(a) => {
            if let Some(dx) = dx {
                dx.clear();
                match a {
                    Activation::Relu => dx.extend(
                        x.iter().zip(dy).map(|(&xi, &d)| if xi > 0.0 { d } else { 0.0 }),
                    ),
                    Activation::Tanh => {
                        dx.extend(y.iter().zip(dy).map(|(&yi, &d)| d * (1.0 - yi * yi)))
                    }
                    Activation::Identity => dx.extend_from_slice(dy),
                }
            }
        }
        Layer::Flatten => {
            if let Some(dx) = dx {
                dx.clear();
                dx.extend_from_slice(dy);
            }
        }
        Layer::Concat { aux_len } => {
            let n = in_shape[0];
            let width = n + aux_len;
            let mut ga = Vec::with_capacity(batch * aux_len);
            for row in dy.chunks(width) {
                ga.extend_from_slice(&row[n..]);
            }
            *daux = Some(ga);
            if let Some(dx) = dx {
                dx.clear();
                for row in dy.chunks(width) {
                    dx.extend_from_slice(&row[..n]);
                }
            }
        }
    }
}

// First maximum in row-major window order, as in the general path.
fn pool_2x2(plane: &[f64], w: usize, ow: usize, base: usize, y: &mut [f64], arg: &mut [usize]) {
    for (oy, (yr, ar)) in y.chunks_mut(ow).zip(arg.chunks_mut(ow)).enumerate() {
        let top = &plane[2 * oy * w..];
        let bottom = &plane[(2 * oy + 1) * w..];
        for (ox, (yv, av)) in yr.iter_mut().zip(ar.iter_mut()).enumerate() {
            let c = 2 * ox;
            let (mut bv, mut bi) = (top[c], 2 * oy * w + c);
            for (v, i) in [(top[c + 1], bi + 1), (bottom[c], bi + w), (bottom[c + 1], bi + w + 1)] {
                let better = v > bv;
                bi = if better { i } else { bi };
                bv = if better { v } else { bv };
            }
            *yv = bv;
            *av = base + bi;
        }
    }
}

fn im2col(x: &[f64], shape: &[usize], kh: usize, kw: usize, oh: usize, ow: usize, cols: &mut [f64]) {
    let (c, h, w) = (shape[0], shape[1], shape[2]);
    let p = oh * ow;
    for ch in 0..c {
        for i in 0..kh {
            for j in 0..kw {
                let row = ((ch * kh + i) * kw + j) * p;
                for oy in 0..oh {
                    let src = ch * h * w + (oy + i) * w + j;
                    cols[row + oy * ow..row + (oy + 1) * ow].copy_from_slice(&x[src..src + ow]);
                }
            }
        }
    }
}

fn col2im(cols: &[f64], shape: &[usize], kh: usize, kw: usize, oh: usize, ow: usize, dx: &mut [f64]) {
    let (c, h, w) = (shape[0], shape[1], shape[2]);
    let p = oh * ow;
    for ch in 0..c {
        for i in 0..kh {
            for j in 0..kw {
                let row = ((ch * kh + i) * kw + j) * p;
                for oy in 0..oh {
                    let dst = ch * h * w + (oy + i) * w + j;
                    for (d, s) in dx[dst..dst + ow].iter_mut().zip(&cols[row + oy * ow..row + (oy + 1) * ow]) {
                        *d += s;
                    }
                }
            }
        }
    }
}

//! Minimal feed-forward engine: dense, convolution, max-pool, activation,
//! flatten and concat layers with batched forward/backward passes.

mod gemm;
mod layer;
mod loss;
mod model;
mod network;
mod presets;
mod tensor;

pub use layer::{Activation, Layer};
pub use loss::mse_loss;
pub(crate) use loss::mse;
pub use model::{Model, MODEL_FORMAT_VERSION};
pub use network::{Cache, Gradients, Network, Workspace};
pub use presets::{
    build_aerocnn1, build_aerocnn2, build_mlp, Architecture, FLOW_FEATURES, IMAGE_SIZE, MLP_INPUTS,
};
pub use tensor::Tensor;

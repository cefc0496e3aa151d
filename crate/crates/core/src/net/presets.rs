//! The three network structures: a fully connected baseline, a convolution
//! over the `(2 x 50)` surface array with the flow parameters appended
//! before the dense stage, and a convolution-pooling pair over the `49 x 49`
//! artificial image.

use std::fmt;
use std::str::FromStr;

use super::layer::{Activation, Layer};
use super::network::Network;
use crate::error::{Error, Result};
use crate::geometry::STATION_COUNT;

/// Flow parameters fed alongside the geometry: Mach, scaled Re, scaled alpha.
pub const FLOW_FEATURES: usize = 3;
pub const MLP_INPUTS: usize = FLOW_FEATURES + 2 * STATION_COUNT;
pub const IMAGE_SIZE: usize = 49;

pub const AEROCNN1_FILTERS: usize = 20;
pub const AEROCNN1_KERNEL: (usize, usize) = (2, 5);
pub const AEROCNN2_FILTERS: usize = 25;
pub const AEROCNN2_KERNEL: usize = 5;
pub const AEROCNN2_POOL: usize = 2;
pub const HIDDEN: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Architecture {
    Mlp,
    AeroCnn1,
    AeroCnn2,
}

impl Architecture {
    pub const ALL: [Architecture; 3] = [Architecture::Mlp, Architecture::AeroCnn1, Architecture::AeroCnn2];

    /// Builds the preset with the given hidden activation and seeded weights.
    pub fn build(self, hidden: Activation, seed: u64) -> Network {
        let mut net = match self {
            Architecture::Mlp => mlp_layout(hidden),
            Architecture::AeroCnn1 => aerocnn1_layout(hidden),
            Architecture::AeroCnn2 => aerocnn2_layout(hidden),
        };
        net.init(seed);
        net
    }

    /// Whether the Reynolds number is part of this architecture's input.
    pub fn uses_reynolds(self) -> bool {
        !matches!(self, Architecture::AeroCnn2)
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Architecture::Mlp => "mlp",
            Architecture::AeroCnn1 => "aerocnn1",
            Architecture::AeroCnn2 => "aerocnn2",
        })
    }
}

impl FromStr for Architecture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mlp" => Ok(Architecture::Mlp),
            "aerocnn1" | "aerocnn-i" => Ok(Architecture::AeroCnn1),
            "aerocnn2" | "aerocnn-ii" => Ok(Architecture::AeroCnn2),
            other => Err(Error::InvalidConfig(format!("unknown architecture {other:?}"))),
        }
    }
}

/// 103 → 200 → 100 → 1, ReLU hidden units, linear output.
pub fn build_mlp(seed: u64) -> Network {
    Architecture::Mlp.build(Activation::Relu, seed)
}

/// `(1, 2, 50)` surface array, 20 filters of `2 x 5`, flow parameters
/// appended after flattening, then 100 hidden units.
pub fn build_aerocnn1(seed: u64) -> Network {
    Architecture::AeroCnn1.build(Activation::Relu, seed)
}

/// `(1, 49, 49)` image, 25 filters of `5 x 5`, `2 x 2` max pooling, then
/// 100 hidden units. No auxiliary input.
pub fn build_aerocnn2(seed: u64) -> Network {
    Architecture::AeroCnn2.build(Activation::Relu, seed)
}

fn mlp_layout(act: Activation) -> Network {
    Network::new(
        vec![MLP_INPUTS],
        vec![
            Layer::dense(MLP_INPUTS, 200),
            Layer::Activation(act),
            Layer::dense(200, HIDDEN),
            Layer::Activation(act),
            Layer::dense(HIDDEN, 1),
            Layer::Activation(Activation::Identity),
        ],
    )
    .expect("mlp preset is shape-consistent")
}

fn aerocnn1_layout(act: Activation) -> Network {
    let (kh, kw) = AEROCNN1_KERNEL;
    let flat = AEROCNN1_FILTERS * (2 - kh + 1) * (STATION_COUNT - kw + 1);
    Network::new(
        vec![1, 2, STATION_COUNT],
        vec![
            Layer::conv2d(1, AEROCNN1_FILTERS, kh, kw),
            Layer::Activation(act),
            Layer::Flatten,
            Layer::Concat { aux_len: FLOW_FEATURES },
            Layer::dense(flat + FLOW_FEATURES, HIDDEN),
            Layer::Activation(act),
            Layer::dense(HIDDEN, 1),
        ],
    )
    .expect("aerocnn1 preset is shape-consistent")
}

fn aerocnn2_layout(act: Activation) -> Network {
    let conv = IMAGE_SIZE - AEROCNN2_KERNEL + 1;
    let pooled = conv / AEROCNN2_POOL;
    let flat = AEROCNN2_FILTERS * pooled * pooled;
    Network::new(
        vec![1, IMAGE_SIZE, IMAGE_SIZE],
        vec![
            Layer::conv2d(1, AEROCNN2_FILTERS, AEROCNN2_KERNEL, AEROCNN2_KERNEL),
            Layer::Activation(act),
            Layer::MaxPool2d {
                ph: AEROCNN2_POOL,
                pw: AEROCNN2_POOL,
            },
            Layer::Flatten,
            Layer::dense(flat, HIDDEN),
            Layer::Activation(act),
            Layer::dense(HIDDEN, 1),
        ],
    )
    .expect("aerocnn2 preset is shape-consistent")
}

use std::collections::HashMap;

use super::{Dataset, FlowCondition};
use crate::error::Result;
use crate::geometry::{AirfoilGeometry, STATION_COUNT};
use crate::net::{Architecture, FLOW_FEATURES, MLP_INPUTS};
use crate::raster::{apply_mach_coloring, raw_density, rasterize, tilt, RasterConfig};
use crate::train::Samples;

/// Network inputs for one entry.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureBundle {
    pub input: Vec<f64>,
    /// Flow parameters appended inside the network; empty when unused.
    pub aux: Vec<f64>,
}

/// `[mach, log10(Re) / 7, alpha / 30]`.
pub fn flow_features(flow: &FlowCondition) -> [f64; FLOW_FEATURES] {
    [flow.mach, flow.reynolds.log10() / 7.0, flow.alpha / 30.0]
}

/// Per-sample input shape and auxiliary length of an architecture.
pub fn input_spec(arch: Architecture, cfg: &RasterConfig) -> (Vec<usize>, usize) {
    match arch {
        Architecture::Mlp => (vec![MLP_INPUTS], 0),
        Architecture::AeroCnn1 => (vec![1, 2, STATION_COUNT], FLOW_FEATURES),
        Architecture::AeroCnn2 => (vec![1, cfg.resolution, cfg.resolution], 0),
    }
}

pub fn encode_features(
    g: &AirfoilGeometry,
    flow: &FlowCondition,
    arch: Architecture,
    cfg: &RasterConfig,
) -> Result<FeatureBundle> {
    let flow_vec = flow_features(flow);
    Ok(match arch {
        Architecture::Mlp => {
            let mut input = Vec::with_capacity(MLP_INPUTS);
            input.extend_from_slice(&flow_vec);
            input.extend_from_slice(&g.y_lower);
            input.extend_from_slice(&g.y_upper);
            FeatureBundle { input, aux: Vec::new() }
        }
        Architecture::AeroCnn1 => {
            let mut input = g.y_lower.clone();
            input.extend_from_slice(&g.y_upper);
            FeatureBundle {
                input,
                aux: flow_vec.to_vec(),
            }
        }
        Architecture::AeroCnn2 => FeatureBundle {
            input: rasterize(g, flow.alpha, flow.mach, cfg)?.values().to_vec(),
            aux: Vec::new(),
        },
    })
}

/// Encodes every entry, with targets and split groups.
///
/// The AeroCNN-II image depends on Mach only through a scale factor, so the
/// digitized density is computed once per (airfoil, alpha).
pub fn encode_dataset(data: &Dataset, arch: Architecture, cfg: &RasterConfig) -> Result<Samples> {
    let (shape, aux_len) = input_spec(arch, cfg);
    let mut samples = Samples::new(shape, aux_len);
    let groups = data.split_groups();
    let mut densities = HashMap::new();
    for (e, group) in data.entries().iter().zip(groups) {
        let g = &data.airfoils()[&e.airfoil];
        let bundle = if arch == Architecture::AeroCnn2 {
            let key = (e.airfoil.as_str(), e.flow.alpha.to_bits());
            let raw = match densities.get(&key) {
                Some(raw) => raw,
                None => {
                    let raw = raw_density(&tilt(g, e.flow.alpha, cfg)?, cfg)?;
                    densities.entry(key).or_insert(raw)
                }
            };
            FeatureBundle {
                input: apply_mach_coloring(raw, e.flow.mach, cfg)?.values().to_vec(),
                aux: Vec::new(),
            }
        } else {
            encode_features(g, &e.flow, arch, cfg)?
        };
        samples.push(&bundle.input, &bundle.aux, e.cl, group)?;
    }
    Ok(samples)
}

//! Closed-form stand-in for solver labels: thin-airfoil lift with a
//! compressibility correction, smooth stall saturation and a weak Reynolds
//! factor.

use std::f64::consts::PI;

use super::{DataEntry, Dataset, FlowCondition, Origin};
use crate::error::{Error, Result};
use crate::geometry::AirfoilGeometry;

const CL_SATURATION: f64 = 1.4;
const RE_SLOPE: f64 = 0.02;

pub fn oracle_cl(g: &AirfoilGeometry, flow: &FlowCondition) -> Result<f64> {
    if !(flow.mach < 1.0) {
        return Err(Error::MachTooHigh(flow.mach));
    }
    let linear = 2.0 * PI * (flow.alpha.to_radians() + 2.0 * g.mean_camber()) / (1.0 - flow.mach * flow.mach).sqrt();
    let saturated = CL_SATURATION * (linear / CL_SATURATION).tanh();
    Ok(saturated * (1.0 + RE_SLOPE * (flow.reynolds / 1e6).log10()))
}

/// Flow conditions labeled by [`oracle_dataset`].
#[derive(Debug, Clone, PartialEq)]
pub struct OracleGrid {
    pub alphas: Vec<f64>,
    pub machs: Vec<f64>,
    pub reynolds: Vec<f64>,
}

impl Default for OracleGrid {
    /// alpha -10..=30 step 2, Mach 0.3..=0.8 step 0.1, Re {1e5, 1e6, 6.5e6}.
    fn default() -> Self {
        Self {
            alphas: (-5..=15).map(|k| (2 * k) as f64).collect(),
            machs: (3..=8).map(|k| k as f64 / 10.0).collect(),
            reynolds: vec![1e5, 1e6, 6.5e6],
        }
    }
}

impl OracleGrid {
    pub fn len(&self) -> usize {
        self.alphas.len() * self.machs.len() * self.reynolds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn conditions(&self) -> impl Iterator<Item = FlowCondition> + '_ {
        self.alphas.iter().flat_map(move |&a| {
            self.machs.iter().flat_map(move |&m| {
                self.reynolds.iter().map(move |&r| FlowCondition::new(a, m, r))
            })
        })
    }
}

/// Labels every geometry at every grid condition.
pub fn oracle_dataset(geometries: &[AirfoilGeometry], grid: &OracleGrid) -> Result<Dataset> {
    let mut data = Dataset::new();
    for g in geometries {
        data.add_airfoil(g.clone())?;
        for flow in grid.conditions() {
            let cl = oracle_cl(g, &flow)?;
            data.push(DataEntry {
                airfoil: g.name.clone(),
                flow,
                cl,
                origin: Origin::Oracle,
            })?;
        }
    }
    data.sort_canonical();
    Ok(data)
}

//! Trains AeroCNN-II on artificial images at a single Reynolds number.
//!
//! ```text
//! cargo run --release --example train_aerocnn2 -- [EPOCHS]
//! ```
//!
//! About six seconds per epoch on one core.

use aerofoil::corpus::{naca, BUNDLED};
use aerofoil::dataio::{augment_flip, encode_dataset, oracle_dataset, OracleGrid};
use aerofoil::geometry::{normalize, resample, Stations};
use aerofoil::net::{Activation, Architecture};
use aerofoil::raster::RasterConfig;
use aerofoil::train::{correlation, fit, predict_all, split_samples, TrainConfig};

fn main() -> aerofoil::Result<()> {
    let epochs: usize = std::env::args().nth(1).map_or(10, |s| s.parse().expect("epoch count"));
    let geometries = BUNDLED
        .iter()
        .map(|d| resample(&normalize(&naca(d, 81)?)?, &Stations::default()))
        .collect::<aerofoil::Result<Vec<_>>>()?;
    let grid = OracleGrid {
        reynolds: vec![1e6],
        ..OracleGrid::default()
    };
    let data = augment_flip(&oracle_dataset(&geometries, &grid)?);

    let samples = encode_dataset(&data, Architecture::AeroCnn2, &RasterConfig::default())?;
    let (train_set, val_set) = split_samples(&samples, 0.95, 42)?;
    println!("{} images: {} train / {} validation", samples.len(), train_set.len(), val_set.len());

    let mut net = Architecture::AeroCnn2.build(Activation::Relu, 42);
    let cfg = TrainConfig::new(Architecture::AeroCnn2, epochs, 0.95, 42);
    fit(&mut net, &train_set, &val_set, &cfg, |r| {
        println!("epoch {:>4}  train {:.5}  val {:.5}  {:.1}s", r.epoch, r.train_mse, r.val_mse, r.seconds);
    })?;
    let pred = predict_all(&net, &val_set)?;
    println!("validation correlation {:.4}", correlation(&pred, &val_set.targets));
    Ok(())
}

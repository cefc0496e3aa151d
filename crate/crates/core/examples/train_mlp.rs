//! Trains the MLP on oracle labels for the bundled corpus.
//!
//! ```text
//! cargo run --release --example train_mlp -- [EPOCHS]
//! ```

use aerofoil::dataio::{augment_flip, encode_dataset, oracle_dataset, OracleGrid};
use aerofoil::geometry::load_geometry;
use aerofoil::net::{Activation, Architecture};
use aerofoil::raster::RasterConfig;
use aerofoil::train::{correlation, fit, predict_all, split_samples, TrainConfig};

fn main() -> aerofoil::Result<()> {
    let epochs: usize = std::env::args().nth(1).map_or(40, |s| s.parse().expect("epoch count"));
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data/airfoils");
    let mut geometries = Vec::new();
    for entry in std::fs::read_dir(&dir).map_err(|e| aerofoil::Error::io(&dir, e))? {
        let path = entry.map_err(|e| aerofoil::Error::io(&dir, e))?.path();
        let text = std::fs::read_to_string(&path).map_err(|e| aerofoil::Error::io(&path, e))?;
        geometries.push(load_geometry(&text)?);
    }
    geometries.sort_by(|a, b| a.name.cmp(&b.name));

    let data = augment_flip(&oracle_dataset(&geometries, &OracleGrid::default())?);
    let samples = encode_dataset(&data, Architecture::Mlp, &RasterConfig::default())?;
    let (train_set, val_set) = split_samples(&samples, 0.85, 42)?;
    println!("{} entries: {} train / {} validation", samples.len(), train_set.len(), val_set.len());

    let mut net = Architecture::Mlp.build(Activation::Relu, 42);
    let cfg = TrainConfig::new(Architecture::Mlp, epochs, 0.85, 42);
    fit(&mut net, &train_set, &val_set, &cfg, |r| {
        println!("epoch {:>4}  train {:.5}  val {:.5}  {:.2}s", r.epoch, r.train_mse, r.val_mse, r.seconds);
    })?;
    let pred = predict_all(&net, &val_set)?;
    println!("validation correlation {:.4}", correlation(&pred, &val_set.targets));
    Ok(())
}

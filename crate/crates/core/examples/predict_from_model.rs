//! Saves a trained model, reloads it and sweeps a lift curve against the
//! oracle labels.
//!
//! ```text
//! cargo run --release --example predict_from_model -- [EPOCHS]
//! ```

use aerofoil::corpus::{naca, BUNDLED};
use aerofoil::dataio::{encode_features, oracle_cl, oracle_dataset, encode_dataset, FlowCondition, OracleGrid};
use aerofoil::geometry::{normalize, resample, Stations};
use aerofoil::net::{Activation, Architecture, Model};
use aerofoil::raster::RasterConfig;
use aerofoil::train::{predict, train, TrainConfig};

fn main() -> aerofoil::Result<()> {
    let epochs: usize = std::env::args().nth(1).map_or(30, |s| s.parse().expect("epoch count"));
    let geometries = BUNDLED
        .iter()
        .map(|d| resample(&normalize(&naca(d, 81)?)?, &Stations::default()))
        .collect::<aerofoil::Result<Vec<_>>>()?;
    let cfg = RasterConfig::default();
    let samples = encode_dataset(&oracle_dataset(&geometries, &OracleGrid::default())?, Architecture::Mlp, &cfg)?;

    let mut model = Model::new(Architecture::Mlp, Activation::Relu, 42);
    let history = train(&mut model.network, &samples, &TrainConfig::new(Architecture::Mlp, epochs, 0.85, 42))?;
    println!("final validation MSE {:.5}", history.records.last().map_or(f64::NAN, |r| r.val_mse));

    let path = std::env::temp_dir().join("aerofoil_mlp.txt");
    model.save(&path)?;
    let loaded = Model::load(&path)?;
    println!("saved and reloaded {} ({} parameters)", path.display(), loaded.network.parameter_count());

    let g = &geometries[BUNDLED.iter().position(|d| *d == "4415").unwrap()];
    println!("{}, M 0.5, Re 1e6", g.name);
    println!("{:>6} {:>9} {:>9}", "alpha", "model", "oracle");
    for alpha in (-10..=30).step_by(4) {
        let flow = FlowCondition::new(alpha as f64, 0.5, 1e6);
        let f = encode_features(g, &flow, Architecture::Mlp, &cfg)?;
        let cl = predict(&loaded.network, &f.input, None)?;
        println!("{alpha:>6} {cl:>9.4} {:>9.4}", oracle_cl(g, &flow)?);
    }
    Ok(())
}

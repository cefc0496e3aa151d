//! Learning curves of the three presets on the same data and split.
//!
//! ```text
//! cargo run --release --example compare_architectures -- [EPOCHS] [TRAIN_FRACTION]
//! ```

use aerofoil::corpus::{naca, BUNDLED};
use aerofoil::dataio::{augment_flip, encode_dataset, oracle_dataset, OracleGrid};
use aerofoil::geometry::{normalize, resample, Stations};
use aerofoil::net::{Activation, Architecture};
use aerofoil::raster::RasterConfig;
use aerofoil::train::{split_indices, fit, TrainConfig};

fn main() -> aerofoil::Result<()> {
    let mut args = std::env::args().skip(1);
    let epochs: usize = args.next().map_or(5, |s| s.parse().expect("epoch count"));
    let fraction: f64 = args.next().map_or(0.3, |s| s.parse().expect("train fraction"));

    let geometries = BUNDLED
        .iter()
        .map(|d| resample(&normalize(&naca(d, 81)?)?, &Stations::default()))
        .collect::<aerofoil::Result<Vec<_>>>()?;
    // Single Reynolds number keeps the image model affordable here.
    let grid = OracleGrid {
        reynolds: vec![1e6],
        ..OracleGrid::default()
    };
    let data = augment_flip(&oracle_dataset(&geometries, &grid)?);

    let mut curves = Vec::new();
    for arch in Architecture::ALL {
        let samples = encode_dataset(&data, arch, &RasterConfig::default())?;
        // Groups depend only on the dataset, so every model sees the same split.
        let (ti, vi) = split_indices(&samples.groups, fraction, 42)?;
        let mut net = arch.build(Activation::Relu, 42);
        let cfg = TrainConfig::new(arch, epochs, fraction, 42);
        let history = fit(&mut net, &samples.subset(&ti), &samples.subset(&vi), &cfg, |_| {})?;
        println!("{arch}: {} parameters", net.parameter_count());
        curves.push((arch, history));
    }

    print!("{:>5}", "epoch");
    for (arch, _) in &curves {
        print!(" {:>12}", format!("{arch} val"));
    }
    println!();
    for e in 0..epochs {
        print!("{:>5}", e + 1);
        for (_, h) in &curves {
            print!(" {:>12.5}", h.records[e].val_mse);
        }
        println!();
    }
    Ok(())
}

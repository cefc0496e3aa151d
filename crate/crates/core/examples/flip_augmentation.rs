//! Upside-down augmentation on a small oracle dataset.
//!
//! ```text
//! cargo run --example flip_augmentation
//! ```

use aerofoil::corpus::naca;
use aerofoil::dataio::{augment_flip, oracle_dataset, OracleGrid, Origin};
use aerofoil::geometry::{normalize, resample, Stations};

fn main() -> aerofoil::Result<()> {
    let geometries = ["0012", "2412"]
        .iter()
        .map(|d| resample(&normalize(&naca(d, 61)?)?, &Stations::default()))
        .collect::<aerofoil::Result<Vec<_>>>()?;
    let grid = OracleGrid {
        alphas: vec![-4.0, 0.0, 4.0, 14.0],
        machs: vec![0.5],
        reynolds: vec![1e6],
    };
    let data = oracle_dataset(&geometries, &grid)?;
    let aug = augment_flip(&data);
    println!("{} entries -> {} after flipping", data.len(), aug.len());
    println!("airfoils: {:?}", aug.airfoils().keys().collect::<Vec<_>>());

    println!("{:<20} {:>7} {:>9} {:>8}", "airfoil", "alpha", "cl", "origin");
    for e in aug.entries() {
        println!("{:<20} {:>7} {:>9.5} {:>8}", e.airfoil, e.flow.alpha, e.cl, e.origin);
    }
    let flipped = aug.entries().iter().filter(|e| e.origin == Origin::Flipped).count();
    // The symmetric section is its own mirror, so only angles whose negation
    // is missing add entries for it.
    println!("{flipped} flipped entries; a second pass adds {}", augment_flip(&aug).len() - aug.len());
    Ok(())
}

//! Loads a coordinate file and prints its 50-station representation.
//!
//! ```text
//! cargo run --example resample_geometry -- [FILE.dat]
//! ```

use std::path::PathBuf;

use aerofoil::geometry::{normalize, parse_airfoil_dat, resample, Stations};

fn main() -> aerofoil::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/airfoils/naca4412.dat"));
    let text = std::fs::read_to_string(&path).map_err(|e| aerofoil::Error::io(&path, e))?;

    let raw = parse_airfoil_dat(&text)?;
    println!("{}: {} points, {:?} layout", raw.name, raw.points.len(), raw.format);
    let g = resample(&normalize(&raw)?, &Stations::default())?;

    println!("{:>3} {:>10} {:>10} {:>10}", "i", "x", "y_upper", "y_lower");
    for (i, x) in g.stations.as_slice().iter().enumerate() {
        println!("{i:>3} {x:>10.6} {:>10.6} {:>10.6}", g.y_upper[i], g.y_lower[i]);
    }
    println!(
        "symmetric: {}, camber range [{:.4}, {:.4}], mean camber {:.5}",
        g.is_symmetric(),
        g.min_camber(),
        g.max_camber(),
        g.mean_camber()
    );
    Ok(())
}

//! Reads solver polar files and turns them into dataset entries.
//!
//! ```text
//! cargo run --example polar_ingest -- [POLAR_DIR]
//! ```

use std::path::PathBuf;

use aerofoil::dataio::{parse_polar, DataEntry, Dataset, FlowCondition, Origin};
use aerofoil::geometry::load_geometry;

fn main() -> aerofoil::Result<()> {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| root.join("data/polars"));

    let mut data = Dataset::new();
    let mut paths: Vec<PathBuf> = std::fs::read_dir(&dir)
        .map_err(|e| aerofoil::Error::io(&dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .collect();
    paths.sort();
    for path in paths {
        let text = std::fs::read_to_string(&path).map_err(|e| aerofoil::Error::io(&path, e))?;
        let polar = match parse_polar(&text) {
            Ok(p) => p,
            Err(e) => {
                println!("{}: {e}", path.display());
                continue;
            }
        };
        let name = polar.name.clone().unwrap_or_default();
        println!("{}: {name:?} M {} Re {:e}, {} rows", path.display(), polar.mach, polar.reynolds, polar.points.len());

        // "NACA 2412" -> data/airfoils/naca2412.dat
        let file = root.join("data/airfoils").join(format!("{}.dat", name.replace(' ', "").to_lowercase()));
        let Ok(coords) = std::fs::read_to_string(&file) else {
            println!("  no coordinates at {}", file.display());
            continue;
        };
        if data.geometry(&name).is_none() {
            data.add_airfoil(load_geometry(&coords)?)?;
        }
        for (alpha, cl) in polar.points {
            let entry = DataEntry {
                airfoil: name.clone(),
                flow: FlowCondition::new(alpha, polar.mach, polar.reynolds),
                cl,
                origin: Origin::Solver,
            };
            if let Err(e) = data.push(entry) {
                println!("  rejected alpha {alpha}: {e}");
            }
        }
    }
    data.sort_canonical();
    print!("{}", data.entries_csv());
    Ok(())
}

//! Renders the Mach-colored artificial image of an airfoil as ASCII art and
//! writes the PGM preview.
//!
//! ```text
//! cargo run --example rasterize_airfoil -- [FILE.dat] [ALPHA] [MACH]
//! ```

use std::path::PathBuf;

use aerofoil::geometry::load_geometry;
use aerofoil::raster::{rasterize, RasterConfig};

fn main() -> aerofoil::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/airfoils/naca2412.dat"));
    let alpha: f64 = args.next().map_or(12.0, |s| s.parse().expect("alpha in degrees"));
    let mach: f64 = args.next().map_or(0.6, |s| s.parse().expect("mach number"));

    let text = std::fs::read_to_string(&path).map_err(|e| aerofoil::Error::io(&path, e))?;
    let g = load_geometry(&text)?;
    let img = rasterize(&g, alpha, mach, &RasterConfig::default())?;

    println!("{} at alpha {alpha} deg, M {mach} (free stream = {:.3})", g.name, img.mach_scale);
    let ramp = [b'#', b'%', b'+', b'.', b' '];
    for row in img.values().chunks(img.resolution()) {
        let line: String = row
            .iter()
            .map(|&v| {
                // 0 (solid) .. mach_scale (free stream)
                let level = (v / img.mach_scale * (ramp.len() - 1) as f64).round() as usize;
                ramp[level.min(ramp.len() - 1)] as char
            })
            .flat_map(|c| [c, c])
            .collect();
        println!("|{line}|");
    }

    let out = std::env::temp_dir().join("aerofoil_image.pgm");
    std::fs::write(&out, img.to_pgm()).map_err(|e| aerofoil::Error::io(&out, e))?;
    println!("wrote {}", out.display());
    Ok(())
}

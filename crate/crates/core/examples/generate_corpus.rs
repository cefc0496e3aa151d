//! Writes the bundled NACA coordinate files.
//!
//! ```text
//! cargo run --example generate_corpus -- [OUT_DIR] [POINTS_PER_SIDE]
//! ```
//!
//! Four-digit sections use the single-loop layout, five-digit sections the
//! two-block layout, so the corpus exercises both parsers.

use std::path::PathBuf;

use aerofoil::corpus::{naca, BUNDLED};
use aerofoil::geometry::{load_geometry, write_dat};

fn main() -> aerofoil::Result<()> {
    let mut args = std::env::args().skip(1);
    let out = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/airfoils"));
    let per_side: usize = args.next().map(|s| s.parse().expect("points per side")).unwrap_or(81);

    std::fs::create_dir_all(&out).map_err(|e| aerofoil::Error::io(&out, e))?;
    for d in BUNDLED {
        let raw = naca(d, per_side)?;
        let text = write_dat(&raw);
        // Everything written must load back cleanly.
        let g = load_geometry(&text)?;
        let path = out.join(format!("naca{d}.dat"));
        std::fs::write(&path, text).map_err(|e| aerofoil::Error::io(&path, e))?;
        println!("{:<12} {:?}  max camber {:.4}", g.name, raw.format, g.max_camber());
    }
    println!("wrote {} files to {}", BUNDLED.len(), out.display());
    Ok(())
}

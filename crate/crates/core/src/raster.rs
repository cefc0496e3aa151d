//! The "artificial image": an airfoil tilted by its angle of attack, digitized
//! into fractional pixel coverage, and colored by freestream Mach number.
//!
//! Raw density `rho` is 100 for pixels completely inside the section and 0
//! for pixels completely outside. The final density is
//! `(1 - rho / 100) * (mach / mach_max)`, so the section interior is always 0
//! and the free stream brightens with Mach number.

use crate::error::{Error, Result};
use crate::geometry::AirfoilGeometry;
use crate::util::fmt_sig;

pub const RHO_MAX: f64 = 100.0;
pub const ALPHA_LIMIT_DEG: f64 = 45.0;

#[derive(Debug, Clone, PartialEq)]
pub struct RasterConfig {
    pub resolution: usize,
    /// Window as `(x_min, x_max, y_min, y_max)` in chord units.
    pub window: (f64, f64, f64, f64),
    pub supersample: usize,
    pub pivot: (f64, f64),
    pub mach_max: f64,
}

impl Default for RasterConfig {
    fn default() -> Self {
        Self {
            resolution: 49,
            window: (-0.25, 1.25, -0.75, 0.75),
            supersample: 4,
            pivot: (0.25, 0.0),
            mach_max: 0.8,
        }
    }
}

impl RasterConfig {
    pub fn validate(&self) -> Result<()> {
        let (x0, x1, y0, y1) = self.window;
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if self.resolution < 3 {
            return bad("resolution must be at least 3");
        }
        if self.supersample < 1 {
            return bad("supersample must be at least 1");
        }
        if !(x1 > x0 && y1 > y0) || ((x1 - x0) - (y1 - y0)).abs() > 1e-12 {
            return bad("raster window must be a non-empty square");
        }
        if !(self.mach_max > 0.0) {
            return bad("mach_max must be positive");
        }
        Ok(())
    }

    pub fn pixel_area(&self) -> f64 {
        let (x0, x1, y0, y1) = self.window;
        (x1 - x0) * (y1 - y0) / (self.resolution * self.resolution) as f64
    }
}

/// Closed vertex loop in chord units (the closing edge is implicit).
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon(pub Vec<(f64, f64)>);

impl Polygon {
    pub fn vertices(&self) -> &[(f64, f64)] {
        &self.0
    }

    /// Signed shoelace area (positive for counter-clockwise loops).
    pub fn signed_area(&self) -> f64 {
        let v = &self.0;
        let n = v.len();
        let twice: f64 = (0..n)
            .map(|i| {
                let (x0, y0) = v[i];
                let (x1, y1) = v[(i + 1) % n];
                x0 * y1 - x1 * y0
            })
            .sum();
        twice / 2.0
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }
}

/// Section outline rotated about the configured pivot; positive `alpha`
/// raises the leading edge.
pub fn tilt(g: &AirfoilGeometry, alpha_deg: f64, cfg: &RasterConfig) -> Result<Polygon> {
    if !(alpha_deg.abs() <= ALPHA_LIMIT_DEG) {
        return Err(Error::AlphaOutOfRange {
            alpha: alpha_deg,
            limit: ALPHA_LIMIT_DEG,
        });
    }
    let mut outline = g.to_raw().points;
    // closed trailing edge: the loop's last vertex repeats the first
    if outline.len() > 1 && outline.first() == outline.last() {
        outline.pop();
    }
    if alpha_deg == 0.0 {
        return Ok(Polygon(outline));
    }
    let (sin, cos) = alpha_deg.to_radians().sin_cos();
    let (px, py) = cfg.pivot;
    Ok(Polygon(
        outline
            .into_iter()
            .map(|(x, y)| {
                let (dx, dy) = (x - px, y - py);
                (px + dx * cos + dy * sin, (py - dx * sin) + dy * cos)
            })
            .collect(),
    ))
}

/// Row-major `resolution x resolution` grid; row 0 is the top of the window.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub resolution: usize,
    pub values: Vec<f64>,
}

impl Grid {
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.resolution + col]
    }

    /// Same grid with rows in reverse order (vertical mirror).
    pub fn flip_rows(&self) -> Grid {
        let n = self.resolution;
        let values = (0..n)
            .rev()
            .flat_map(|r| self.values[r * n..(r + 1) * n].iter().copied())
            .collect();
        Grid {
            resolution: n,
            values,
        }
    }
}

/// Percentage of each pixel's regularly spaced subsamples that fall inside
/// the polygon (even-odd rule).
pub fn raw_density(poly: &Polygon, cfg: &RasterConfig) -> Result<Grid> {
    cfg.validate()?;
    let (x0, x1, y0, y1) = cfg.window;
    if let Some(&(x, y)) = poly
        .vertices()
        .iter()
        .find(|&&(x, y)| !(x >= x0 && x <= x1 && y >= y0 && y <= y1))
    {
        return Err(Error::PolygonOutsideWindow { x, y });
    }

    let res = cfg.resolution;
    let s = cfg.supersample;
    let lines = res * s;
    // Subsample lines sit at odd multiples of a half-step from the window
    // center, so mirrored lines have exactly negated offsets.
    let (cx, cy) = ((x0 + x1) / 2.0, (y0 + y1) / 2.0);
    let half_x = (x1 - x0) / (2 * lines) as f64;
    let half_y = (y1 - y0) / (2 * lines) as f64;
    let offset = |k: usize| (2 * k + 1) as f64 - lines as f64;
    let sample_x: Vec<f64> = (0..lines).map(|k| cx + offset(k) * half_x).collect();

    let edges = canonical_edges(poly.vertices());
    let mut counts = vec![0u32; res * res];
    let mut crossings = Vec::with_capacity(edges.len());
    for j in 0..lines {
        let py = cy - offset(j) * half_y;
        crossings.clear();
        crossings.extend(edges.iter().filter_map(|e| e.crossing(py)));
        if crossings.is_empty() {
            continue;
        }
        crossings.sort_by(f64::total_cmp);
        let row = j / s;
        for (i, &px) in sample_x.iter().enumerate() {
            let right = crossings.len() - crossings.partition_point(|&c| c <= px);
            if right % 2 == 1 {
                counts[row * res + i / s] += 1;
            }
        }
    }

    let per_pixel = (s * s) as f64;
    Ok(Grid {
        resolution: res,
        values: counts
            .into_iter()
            .map(|c| RHO_MAX * c as f64 / per_pixel)
            .collect(),
    })
}

struct Edge {
    a: (f64, f64),
    b: (f64, f64),
}

impl Edge {
    // x where the horizontal line through `py` crosses the edge, if it does.
    fn crossing(&self, py: f64) -> Option<f64> {
        let (a, b) = (self.a, self.b);
        if (a.1 > py) == (b.1 > py) {
            return None;
        }
        if a.0 == b.0 {
            return Some(a.0);
        }
        Some(a.0 + ((py - a.1) * (b.0 - a.0)) / (b.1 - a.1))
    }
}

// Endpoints ordered by x so the intercept arithmetic does not depend on
// traversal direction; a reversed or mirrored loop yields identical crossings.
fn canonical_edges(v: &[(f64, f64)]) -> Vec<Edge> {
    let n = v.len();
    (0..n)
        .map(|i| {
            let (p, q) = (v[i], v[(i + 1) % n]);
            if p.0 <= q.0 {
                Edge { a: p, b: q }
            } else {
                Edge { a: q, b: p }
            }
        })
        .collect()
}

/// Mach-colored density grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ArtificialImage {
    pub grid: Grid,
    /// `mach / mach_max`, the free-stream pixel value.
    pub mach_scale: f64,
}

impl ArtificialImage {
    pub fn resolution(&self) -> usize {
        self.grid.resolution
    }

    pub fn values(&self) -> &[f64] {
        &self.grid.values
    }

    /// Plain-text grid: one row per line, six significant digits.
    pub fn to_text(&self) -> String {
        let n = self.resolution();
        let mut out = String::with_capacity(n * n * 9);
        for row in self.grid.values.chunks(n) {
            let line: Vec<String> = row.iter().map(|&v| fmt_sig(v, 6)).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    /// Binary greyscale PGM (P5, maxval 255), normalized by the free-stream
    /// value. Lossy; for previews only.
    pub fn to_pgm(&self) -> Vec<u8> {
        let n = self.resolution();
        let mut out = format!("P5\n{n} {n}\n255\n").into_bytes();
        out.extend(self.grid.values.iter().map(|&v| {
            let level = (v * 255.0 / self.mach_scale).round();
            level.clamp(0.0, 255.0) as u8
        }));
        out
    }
}

/// Parses the plain-text grid written by [`ArtificialImage::to_text`].
pub fn parse_grid_text(text: &str) -> Result<Grid> {
    let mut values = Vec::new();
    let mut rows = 0;
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let row: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::MalformedRecord {
                line: i + 1,
                reason: format!("{e}"),
            })?;
        if rows > 0 && row.len() * rows != values.len() {
            return Err(Error::MalformedRecord {
                line: i + 1,
                reason: "ragged grid".into(),
            });
        }
        values.extend(row);
        rows += 1;
    }
    if rows == 0 || values.len() != rows * rows {
        return Err(Error::MalformedRecord {
            line: rows,
            reason: "grid is not square".into(),
        });
    }
    Ok(Grid {
        resolution: rows,
        values,
    })
}

pub fn apply_mach_coloring(raw: &Grid, mach: f64, cfg: &RasterConfig) -> Result<ArtificialImage> {
    if !(mach > 0.0 && mach <= cfg.mach_max) {
        return Err(Error::MachOutOfRange {
            mach,
            max: cfg.mach_max,
        });
    }
    let scale = mach / cfg.mach_max;
    Ok(ArtificialImage {
        grid: Grid {
            resolution: raw.resolution,
            values: raw
                .values
                .iter()
                .map(|&rho| (1.0 - rho / RHO_MAX) * scale)
                .collect(),
        },
        mach_scale: scale,
    })
}

/// Full pipeline: tilt, digitize, color.
pub fn rasterize(
    g: &AirfoilGeometry,
    alpha_deg: f64,
    mach: f64,
    cfg: &RasterConfig,
) -> Result<ArtificialImage> {
    let poly = tilt(g, alpha_deg, cfg)?;
    let raw = raw_density(&poly, cfg)?;
    apply_mach_coloring(&raw, mach, cfg)
}

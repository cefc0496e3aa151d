//! Airfoil coordinate ingestion and station resampling.
//!
//! Coordinate files come in two layouts: a single surface loop running
//! trailing edge → leading edge → trailing edge, or two blocks (upper, lower)
//! that each start at the leading edge, preceded by a line holding the two
//! block point counts. Both are stitched into loop order on parse.

use std::fmt;

use crate::error::{Error, Result};

/// Minimum number of distinct points a coordinate file must provide.
pub const MIN_POINTS: usize = 5;

/// Number of stations used by every network input.
pub const STATION_COUNT: usize = 50;

const MONOTONE_TOL: f64 = 1e-6;
const FLIPPED_SUFFIX: &str = "-flipped";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoordinateFormat {
    SurfaceLoop,
    TwoBlock,
}

/// Raw coordinate loop as read from a file.
#[derive(Debug, Clone, PartialEq)]
pub struct RawAirfoil {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    pub format: CoordinateFormat,
}

/// Parses a coordinate file in either supported layout.
pub fn parse_airfoil_dat(text: &str) -> Result<RawAirfoil> {
    let mut lines = text.lines().enumerate();
    let name = loop {
        match lines.next() {
            Some((_, l)) if l.trim().is_empty() => continue,
            Some((_, l)) => break l.trim().to_string(),
            None => return Err(Error::EmptyFile),
        }
    };

    let mut numeric = Vec::new();
    for (idx, line) in lines {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let malformed = || Error::MalformedLine {
            line: idx + 1,
            content: line.to_string(),
        };
        let mut tokens = trimmed.split_whitespace();
        let x: f64 = tokens.next().and_then(|t| t.parse().ok()).ok_or_else(malformed)?;
        let y: f64 = tokens.next().and_then(|t| t.parse().ok()).ok_or_else(malformed)?;
        if tokens.next().is_some() || !x.is_finite() || !y.is_finite() {
            return Err(malformed());
        }
        numeric.push((idx + 1, x, y));
    }

    let (format, points) = match numeric.first() {
        Some(&(line, a, b)) if is_count(a) && is_count(b) => {
            let (n_upper, n_lower) = (a as usize, b as usize);
            let body: Vec<(f64, f64)> = numeric[1..].iter().map(|&(_, x, y)| (x, y)).collect();
            if body.len() != n_upper + n_lower {
                return Err(Error::MalformedLine {
                    line,
                    content: format!(
                        "block header announces {} + {} points, found {}",
                        n_upper,
                        n_lower,
                        body.len()
                    ),
                });
            }
            let mut stitched: Vec<(f64, f64)> = body[..n_upper].iter().rev().copied().collect();
            stitched.extend_from_slice(&body[n_upper..]);
            (CoordinateFormat::TwoBlock, stitched)
        }
        _ => (
            CoordinateFormat::SurfaceLoop,
            numeric.iter().map(|&(_, x, y)| (x, y)).collect(),
        ),
    };

    let points = dedup_consecutive(points);
    if points.len() < MIN_POINTS {
        return Err(Error::TooFewPoints {
            got: points.len(),
            min: MIN_POINTS,
        });
    }
    Ok(RawAirfoil {
        name,
        points,
        format,
    })
}

// A block-count header holds two integral values >= 2; coordinates never do
// both at once on a unit-ish chord.
fn is_count(v: f64) -> bool {
    v >= 2.0 && v.fract() == 0.0 && v < 1e6
}

fn dedup_consecutive(mut points: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    points.dedup();
    points
}

/// Shifts and scales the loop so x spans exactly `[0, 1]`; y is scaled by
/// the same factor.
pub fn normalize(raw: &RawAirfoil) -> Result<RawAirfoil> {
    let (min_x, max_x) = raw
        .points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(x, _)| {
            (lo.min(x), hi.max(x))
        });
    let extent = max_x - min_x;
    if !(extent >= 1e-9) {
        return Err(Error::DegenerateChord { extent });
    }
    let points = raw
        .points
        .iter()
        .map(|&(x, y)| ((x - min_x) / extent, y / extent))
        .collect();
    Ok(RawAirfoil {
        name: raw.name.clone(),
        points: dedup_consecutive(points),
        format: raw.format,
    })
}

/// Ascending chordwise stations, clustered toward the leading edge.
#[derive(Debug, Clone, PartialEq)]
pub struct Stations(Vec<f64>);

impl Stations {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Default for Stations {
    fn default() -> Self {
        make_stations(STATION_COUNT)
    }
}

/// Half-cosine stations `x = 1 - cos(pi t / 2)`, `t = i / (n - 1)`.
///
/// Endpoints are pinned to exactly 0 and 1.
pub fn make_stations(n: usize) -> Stations {
    assert!(n >= 2, "need at least two stations, got {n}");
    let last = (n - 1) as f64;
    let mut x: Vec<f64> = (0..n)
        .map(|i| 1.0 - (std::f64::consts::FRAC_PI_2 * i as f64 / last).cos())
        .collect();
    x[0] = 0.0;
    x[n - 1] = 1.0;
    Stations(x)
}

/// Unit-chord airfoil sampled at shared stations.
#[derive(Debug, Clone, PartialEq)]
pub struct AirfoilGeometry {
    pub name: String,
    pub stations: Stations,
    pub y_upper: Vec<f64>,
    pub y_lower: Vec<f64>,
}

impl AirfoilGeometry {
    /// Builds a geometry from station values, checking closure and ordering.
    pub fn new(
        name: impl Into<String>,
        stations: Stations,
        y_upper: Vec<f64>,
        y_lower: Vec<f64>,
    ) -> Result<Self> {
        let n = stations.len();
        if y_upper.len() != n || y_lower.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "{} stations but {} upper / {} lower values",
                n,
                y_upper.len(),
                y_lower.len()
            )));
        }
        if let Some(station) = (0..n).find(|&i| y_upper[i] < y_lower[i]) {
            return Err(Error::CrossedSurfaces { station });
        }
        for i in [0, n - 1] {
            if (y_upper[i] - y_lower[i]).abs() > 1e-6 {
                return Err(Error::InvalidEntry(format!(
                    "surfaces not closed at station {i}"
                )));
            }
        }
        Ok(Self {
            name: name.into(),
            stations,
            y_upper,
            y_lower,
        })
    }

    /// Mean of the camber line `(y_upper + y_lower) / 2` over all stations.
    pub fn mean_camber(&self) -> f64 {
        let sum: f64 = self
            .y_upper
            .iter()
            .zip(&self.y_lower)
            .map(|(u, l)| (u + l) / 2.0)
            .sum();
        sum / self.y_upper.len() as f64
    }

    pub fn max_camber(&self) -> f64 {
        self.camber_line().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_camber(&self) -> f64 {
        self.camber_line().fold(f64::INFINITY, f64::min)
    }

    fn camber_line(&self) -> impl Iterator<Item = f64> + '_ {
        self.y_upper
            .iter()
            .zip(&self.y_lower)
            .map(|(u, l)| (u + l) / 2.0)
    }

    /// True when the lower surface mirrors the upper one exactly.
    pub fn is_symmetric(&self) -> bool {
        self.y_upper
            .iter()
            .zip(&self.y_lower)
            .all(|(u, l)| *u == -*l)
    }

    /// Closed loop in file order: upper surface TE → LE, then lower LE → TE.
    pub fn to_raw(&self) -> RawAirfoil {
        let x = self.stations.as_slice();
        let mut points: Vec<(f64, f64)> = x
            .iter()
            .zip(&self.y_upper)
            .rev()
            .map(|(&x, &y)| (x, y))
            .collect();
        points.extend(x.iter().zip(&self.y_lower).skip(1).map(|(&x, &y)| (x, y)));
        RawAirfoil {
            name: self.name.clone(),
            points,
            format: CoordinateFormat::SurfaceLoop,
        }
    }

    /// Writes the geometry as a surface-loop coordinate file.
    pub fn to_dat(&self) -> String {
        write_dat(&self.to_raw())
    }
}

impl fmt::Display for AirfoilGeometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({} stations)", self.name, self.stations.len())
    }
}

/// Renders a coordinate file in the layout recorded on `raw`.
pub fn write_dat(raw: &RawAirfoil) -> String {
    let mut out = format!("{}\n", raw.name);
    match raw.format {
        CoordinateFormat::SurfaceLoop => {
            for (x, y) in &raw.points {
                out.push_str(&format!("{} {}\n", coord(*x), coord(*y)));
            }
        }
        CoordinateFormat::TwoBlock => {
            let le = first_min_x(&raw.points);
            let upper: Vec<_> = raw.points[..=le].iter().rev().collect();
            let lower: Vec<_> = raw.points[le..].iter().collect();
            out.push_str(&format!("{}. {}.\n\n", upper.len(), lower.len()));
            for (x, y) in upper {
                out.push_str(&format!("{} {}\n", coord(*x), coord(*y)));
            }
            out.push('\n');
            for (x, y) in lower {
                out.push_str(&format!("{} {}\n", coord(*x), coord(*y)));
            }
        }
    }
    out
}

// Seven decimals, without a sign on values that round to zero.
fn coord(v: f64) -> String {
    let s = format!("{v:.7}");
    match s.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_string(),
        _ => s,
    }
}

fn first_min_x(points: &[(f64, f64)]) -> usize {
    let mut best = 0;
    for (i, p) in points.iter().enumerate() {
        if p.0 < points[best].0 {
            best = i;
        }
    }
    best
}

/// Splits a normalized loop at its leading edge and interpolates both
/// surfaces onto `stations`.
pub fn resample(raw: &RawAirfoil, stations: &Stations) -> Result<AirfoilGeometry> {
    let le = first_min_x(&raw.points);
    let mut first: Vec<(f64, f64)> = raw.points[..=le].to_vec();
    first.reverse();
    let second: Vec<(f64, f64)> = raw.points[le..].to_vec();
    if first.len() < 2 || second.len() < 2 {
        return Err(Error::NonMonotonicSurface { x: raw.points[le].0 });
    }

    let a = interpolate_surface(&first, stations.as_slice())?;
    let b = interpolate_surface(&second, stations.as_slice())?;
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (mut upper, mut lower) = if mean(&a) < mean(&b) { (b, a) } else { (a, b) };

    let n = stations.len();
    for i in [0, n - 1] {
        if upper[i] != lower[i] {
            let avg = (upper[i] + lower[i]) / 2.0;
            upper[i] = avg;
            lower[i] = avg;
        }
    }
    AirfoilGeometry::new(raw.name.clone(), stations.clone(), upper, lower)
}

/// Linear interpolation of one surface (leading edge first).
fn interpolate_surface(surface: &[(f64, f64)], stations: &[f64]) -> Result<Vec<f64>> {
    let mut xs = Vec::with_capacity(surface.len());
    let mut running = f64::NEG_INFINITY;
    for &(x, _) in surface {
        if x < running - MONOTONE_TOL {
            return Err(Error::NonMonotonicSurface { x });
        }
        running = running.max(x);
        xs.push(running);
    }
    let ys: Vec<f64> = surface.iter().map(|p| p.1).collect();
    let last = xs.len() - 1;

    Ok(stations
        .iter()
        .map(|&s| {
            let hi = xs.partition_point(|&x| x <= s);
            if hi == 0 {
                ys[0]
            } else if hi > last {
                ys[last]
            } else {
                let lo = hi - 1;
                let t = (s - xs[lo]) / (xs[hi] - xs[lo]);
                ys[lo] + (ys[hi] - ys[lo]) * t
            }
        })
        .collect())
}

/// Upside-down airfoil: `y_upper' = -y_lower`, `y_lower' = -y_upper`.
///
/// The `-flipped` name suffix toggles, so flipping twice restores the name.
pub fn flip_geometry(g: &AirfoilGeometry) -> AirfoilGeometry {
    AirfoilGeometry {
        name: flipped_name(&g.name),
        stations: g.stations.clone(),
        y_upper: g.y_lower.iter().map(|y| -y).collect(),
        y_lower: g.y_upper.iter().map(|y| -y).collect(),
    }
}

pub fn flipped_name(name: &str) -> String {
    match name.strip_suffix(FLIPPED_SUFFIX) {
        Some(base) => base.to_string(),
        None => format!("{name}{FLIPPED_SUFFIX}"),
    }
}

/// Name with any `-flipped` suffix removed.
pub fn base_name(name: &str) -> &str {
    name.strip_suffix(FLIPPED_SUFFIX).unwrap_or(name)
}

pub fn is_flipped_name(name: &str) -> bool {
    name.ends_with(FLIPPED_SUFFIX)
}

/// parse → normalize → resample onto the default stations.
pub fn load_geometry(text: &str) -> Result<AirfoilGeometry> {
    let raw = normalize(&parse_airfoil_dat(text)?)?;
    resample(&raw, &Stations::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    const FLAT: &str = "flat\n1 0\n0.5 0.001\n0 0\n0.5 -0.001\n1 0";

    fn flat_plate() -> AirfoilGeometry {
        let st = Stations::default();
        let n = st.len();
        let mut upper = vec![0.001; n];
        let mut lower = vec![-0.001; n];
        upper[0] = 0.0;
        lower[0] = 0.0;
        upper[n - 1] = 0.0;
        lower[n - 1] = 0.0;
        AirfoilGeometry::new("plate", st, upper, lower).unwrap()
    }

    #[test]
    fn parses_minimal_loop() {
        let raw = parse_airfoil_dat(FLAT).unwrap();
        assert_eq!(raw.name, "flat");
        assert_eq!(raw.points.len(), 5);
        assert_eq!(raw.format, CoordinateFormat::SurfaceLoop);
        assert_eq!(raw.points[2], (0.0, 0.0));
    }

    #[test]
    fn rejects_bad_files() {
        assert!(matches!(parse_airfoil_dat(""), Err(Error::EmptyFile)));
        assert!(matches!(parse_airfoil_dat("  \n\n"), Err(Error::EmptyFile)));
        let bad = "x\n1 0\n0.5 abc\n0 0\n0.5 -0.1\n1 0";
        assert!(matches!(
            parse_airfoil_dat(bad),
            Err(Error::MalformedLine { line: 3, .. })
        ));
        assert!(matches!(
            parse_airfoil_dat("x\n1 0\n0 0\n1 0"),
            Err(Error::TooFewPoints { got: 3, .. })
        ));
    }

    #[test]
    fn two_block_is_stitched_upper_reversed_then_lower() {
        let mut text = String::from("blocky\n33. 33.\n\n");
        let upper: Vec<(f64, f64)> = (0..33)
            .map(|i| {
                let x = i as f64 / 32.0;
                (x, 0.1 * (x * (1.0 - x)).sqrt() + 1e-3)
            })
            .collect();
        let lower: Vec<(f64, f64)> = (0..33)
            .map(|i| {
                let x = i as f64 / 32.0;
                (x, -0.05 * (x * (1.0 - x)).sqrt() - 1e-3)
            })
            .collect();
        for (x, y) in &upper {
            text.push_str(&format!("{x} {y}\n"));
        }
        text.push('\n');
        for (x, y) in &lower {
            text.push_str(&format!("{x} {y}\n"));
        }
        let raw = parse_airfoil_dat(&text).unwrap();
        assert_eq!(raw.format, CoordinateFormat::TwoBlock);
        assert_eq!(raw.points.len(), 66);
        assert_eq!(raw.points[0], upper[32]);
        assert_eq!(raw.points[32], upper[0]);
        assert_eq!(raw.points[33], lower[0]);
        assert_eq!(raw.points[65], lower[32]);
    }

    #[test]
    fn two_block_shared_leading_edge_is_not_duplicated() {
        let text = "shared\n3. 3.\n0 0\n0.5 0.05\n1 0\n\n0 0\n0.5 -0.05\n1 0\n";
        let raw = parse_airfoil_dat(text).unwrap();
        assert_eq!(raw.points.len(), 5);
        assert_eq!(raw.points[2], (0.0, 0.0));
    }

    #[test]
    fn normalize_identity_and_scale() {
        let raw = parse_airfoil_dat(FLAT).unwrap();
        assert_eq!(normalize(&raw).unwrap(), raw);

        let mut scaled = raw.clone();
        for p in &mut scaled.points {
            p.0 *= 2.0;
            p.1 *= 2.0;
        }
        let back = normalize(&scaled).unwrap();
        for (a, b) in back.points.iter().zip(&raw.points) {
            assert!((a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12);
        }
    }

    #[test]
    fn normalize_degenerate() {
        let raw = RawAirfoil {
            name: "dot".into(),
            points: vec![(0.5, 0.0), (0.5, 0.1), (0.5, 0.2), (0.5, 0.3), (0.5, 0.4)],
            format: CoordinateFormat::SurfaceLoop,
        };
        assert!(matches!(normalize(&raw), Err(Error::DegenerateChord { .. })));
    }

    #[test]
    fn stations_formula() {
        let st = make_stations(50);
        let x = st.as_slice();
        assert_eq!(x[0], 0.0);
        assert_eq!(x[49], 1.0);
        let expected = 1.0 - (std::f64::consts::PI / 98.0).cos();
        assert!((x[1] - expected).abs() < 1e-15);
        assert!((x[1] - 5.138e-4).abs() < 1e-6);
        assert!((x[49] - x[48] - 0.032).abs() < 1e-3);
        assert!(x[49] - x[48] > x[1] - x[0]);
        assert_eq!(make_stations(2).as_slice(), &[0.0, 1.0]);
        for w in x.windows(3) {
            assert!(w[1] > w[0]);
            assert!(w[2] - w[1] > w[1] - w[0]);
        }
    }

    #[test]
    fn resample_flat_plate() {
        let raw = parse_airfoil_dat(FLAT).unwrap();
        let g = resample(&raw, &Stations::default()).unwrap();
        for i in 1..49 {
            let x = g.stations.as_slice()[i];
            // linear between LE/TE and the mid-chord vertex
            let expect = if x <= 0.5 { 0.001 * x / 0.5 } else { 0.001 * (1.0 - x) / 0.5 };
            assert!((g.y_upper[i] - expect).abs() < 1e-15);
            assert!((g.y_lower[i] + expect).abs() < 1e-15);
        }
    }

    #[test]
    fn resample_plate_with_constant_thickness() {
        let text = "slab\n1 0.001\n0.5 0.001\n0 0.001\n0 -0.001\n0.5 -0.001\n1 -0.001";
        let g = resample(&parse_airfoil_dat(text).unwrap(), &Stations::default()).unwrap();
        for i in 1..49 {
            assert_eq!(g.y_upper[i], 0.001);
            assert_eq!(g.y_lower[i], -0.001);
        }
        // both ends closed by averaging
        assert_eq!(g.y_upper[0], g.y_lower[0]);
        assert_eq!(g.y_upper[49], 0.0);
    }

    #[test]
    fn resample_swaps_when_first_surface_is_lower() {
        let text = "lowfirst\n1 0\n0.5 -0.05\n0 0\n0.5 0.08\n1 0";
        let g = resample(&parse_airfoil_dat(text).unwrap(), &Stations::default()).unwrap();
        assert!(g.y_upper[25] > 0.0 && g.y_lower[25] < 0.0);
    }

    #[test]
    fn resample_rejects_zigzag_surface() {
        let text = "zig\n1 0\n0.3 0.05\n0.6 0.06\n0 0\n0.5 -0.05\n1 0";
        assert!(matches!(
            resample(&parse_airfoil_dat(text).unwrap(), &Stations::default()),
            Err(Error::NonMonotonicSurface { .. })
        ));
    }

    #[test]
    fn flip_is_involution_and_toggles_name() {
        let g = flat_plate();
        let f = flip_geometry(&g);
        assert_eq!(f.name, "plate-flipped");
        assert_eq!(flip_geometry(&f), g);
        // flat plate is symmetric
        assert_eq!(f.y_upper, g.y_upper);
        assert_eq!(f.y_lower, g.y_lower);
        assert!(g.is_symmetric());
    }

    #[test]
    fn geometry_validation() {
        let st = make_stations(3);
        assert!(AirfoilGeometry::new("a", st.clone(), vec![0.0, 0.1, 0.0], vec![0.0, -0.1, 0.0]).is_ok());
        assert!(matches!(
            AirfoilGeometry::new("a", st.clone(), vec![0.0, -0.1, 0.0], vec![0.0, 0.1, 0.0]),
            Err(Error::CrossedSurfaces { station: 1 })
        ));
        assert!(AirfoilGeometry::new("a", st.clone(), vec![0.0, 0.1, 0.01], vec![0.0, -0.1, 0.0]).is_err());
        assert!(matches!(
            AirfoilGeometry::new("a", st, vec![0.0; 2], vec![0.0; 3]),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn dat_round_trip_two_block() {
        let raw = parse_airfoil_dat("b\n3. 3.\n0 0\n0.5 0.05\n1 0\n\n0 0\n0.5 -0.05\n1 0\n").unwrap();
        let again = parse_airfoil_dat(&write_dat(&raw)).unwrap();
        assert_eq!(again, raw);
    }
}

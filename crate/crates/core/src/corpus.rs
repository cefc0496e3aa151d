//! Analytic NACA 4- and 5-digit section generators.
//!
//! Used to build the bundled coordinate corpus under `data/airfoils` and as
//! test fixtures; real coordinate files go through [`crate::geometry`].

use crate::error::{Error, Result};
use crate::geometry::{CoordinateFormat, RawAirfoil};

/// Section designations shipped in `data/airfoils`.
pub const BUNDLED: [&str; 20] = [
    "0009", "0012", "0015", "0018", "0021", "1412", "2409", "2412", "2415", "2418", "3412",
    "4409", "4412", "4415", "4418", "6412", "22012", "23012", "23015", "24012",
];

/// Generates a NACA section from its 4- or 5-digit designation.
///
/// `per_side` points are placed on each surface with cosine spacing; the
/// loop runs upper TE → LE → lower TE. Five-digit sections are tagged as
/// two-block so the corpus exercises both file layouts.
pub fn naca(designation: &str, per_side: usize) -> Result<RawAirfoil> {
    let digits: Vec<u32> = designation
        .chars()
        .map(|c| c.to_digit(10))
        .collect::<Option<_>>()
        .ok_or_else(|| Error::InvalidConfig(format!("bad NACA designation {designation:?}")))?;
    if per_side < 3 {
        return Err(Error::InvalidConfig("need at least 3 points per side".into()));
    }

    let (camber, thickness, format): (Box<dyn Fn(f64) -> (f64, f64)>, f64, _) = match digits[..] {
        [m, p, t1, t2] => {
            let m = m as f64 / 100.0;
            let p = p as f64 / 10.0;
            (Box::new(move |x| four_digit_camber(m, p, x)), (t1 * 10 + t2) as f64 / 100.0, CoordinateFormat::SurfaceLoop)
        }
        [l, p, 0, t1, t2] if (1..=5).contains(&p) => {
            let design_cl = 0.15 * l as f64;
            let (r, k1) = FIVE_DIGIT[(p - 1) as usize];
            let k1 = k1 * design_cl / 0.3;
            (Box::new(move |x| five_digit_camber(r, k1, x)), (t1 * 10 + t2) as f64 / 100.0, CoordinateFormat::TwoBlock)
        }
        _ => {
            return Err(Error::InvalidConfig(format!(
                "unsupported NACA designation {designation:?}"
            )))
        }
    };

    let xs: Vec<f64> = (0..per_side)
        .map(|i| {
            let beta = std::f64::consts::PI * i as f64 / (per_side - 1) as f64;
            0.5 * (1.0 - beta.cos())
        })
        .collect();

    let mut upper = Vec::with_capacity(per_side);
    let mut lower = Vec::with_capacity(per_side);
    for &x in &xs {
        let yt = half_thickness(thickness, x);
        let (yc, slope) = camber(x);
        let theta = slope.atan();
        upper.push((x - yt * theta.sin(), yc + yt * theta.cos()));
        lower.push((x + yt * theta.sin(), yc - yt * theta.cos()));
    }

    let mut points: Vec<(f64, f64)> = upper.into_iter().rev().collect();
    points.extend(lower.into_iter().skip(1));
    Ok(RawAirfoil {
        name: format!("NACA {designation}"),
        points,
        format,
    })
}

// (r, k1) for design lift coefficient 0.3, standard (non-reflexed) mean lines.
const FIVE_DIGIT: [(f64, f64); 5] = [
    (0.0580, 361.4),
    (0.1260, 51.64),
    (0.2025, 15.957),
    (0.2900, 6.643),
    (0.3910, 3.230),
];

// Closed trailing-edge variant of the thickness polynomial.
fn half_thickness(t: f64, x: f64) -> f64 {
    5.0 * t
        * (0.2969 * x.sqrt() - 0.1260 * x - 0.3516 * x * x + 0.2843 * x.powi(3)
            - 0.1036 * x.powi(4))
}

fn four_digit_camber(m: f64, p: f64, x: f64) -> (f64, f64) {
    if m == 0.0 || p == 0.0 {
        (0.0, 0.0)
    } else if x < p {
        (m / (p * p) * (2.0 * p * x - x * x), 2.0 * m / (p * p) * (p - x))
    } else {
        let q = (1.0 - p) * (1.0 - p);
        (m / q * ((1.0 - 2.0 * p) + 2.0 * p * x - x * x), 2.0 * m / q * (p - x))
    }
}

fn five_digit_camber(r: f64, k1: f64, x: f64) -> (f64, f64) {
    if x < r {
        (
            k1 / 6.0 * (x.powi(3) - 3.0 * r * x * x + r * r * (3.0 - r) * x),
            k1 / 6.0 * (3.0 * x * x - 6.0 * r * x + r * r * (3.0 - r)),
        )
    } else {
        (k1 * r.powi(3) / 6.0 * (1.0 - x), -k1 * r.powi(3) / 6.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{normalize, resample, Stations};

    #[test]
    fn symmetric_sections_are_exactly_symmetric() {
        let raw = naca("0012", 61).unwrap();
        let g = resample(&normalize(&raw).unwrap(), &Stations::default()).unwrap();
        assert!(g.is_symmetric());
        let t_max = g
            .y_upper
            .iter()
            .zip(&g.y_lower)
            .map(|(u, l)| u - l)
            .fold(0.0, f64::max);
        assert!((t_max - 0.12).abs() < 2e-3, "{t_max}");
    }

    #[test]
    fn cambered_sections_have_positive_camber() {
        for d in ["2412", "4415", "23012"] {
            let raw = naca(d, 61).unwrap();
            let g = resample(&normalize(&raw).unwrap(), &Stations::default()).unwrap();
            assert!(g.mean_camber() > 0.0, "{d}");
        }
        let g = resample(&normalize(&naca("4412", 81).unwrap()).unwrap(), &Stations::default()).unwrap();
        assert!((g.max_camber() - 0.04).abs() < 1e-3);
    }

    #[test]
    fn rejects_unknown_designations() {
        assert!(naca("12", 61).is_err());
        assert!(naca("23112", 61).is_err());
        assert!(naca("abcd", 61).is_err());
    }
}

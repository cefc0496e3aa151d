//! Solver polar dumps: a free-form header carrying `Mach = ` and `Re = `,
//! a column-title line starting with `alpha`, a dashed separator, then one
//! row per converged angle (alpha, CL, further columns ignored).

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Polar {
    /// From a `Calculated polar for:` header line, when present.
    pub name: Option<String>,
    pub mach: f64,
    pub reynolds: f64,
    /// (alpha in degrees, cl).
    pub points: Vec<(f64, f64)>,
}

pub fn parse_polar(text: &str) -> Result<Polar> {
    let lines: Vec<&str> = text.lines().collect();
    let mut name = None;
    let mut mach = None;
    let mut reynolds = None;
    let mut title = None;
    for (i, line) in lines.iter().enumerate() {
        if let Some(rest) = line.split_once("polar for:").map(|(_, r)| r.trim()) {
            if !rest.is_empty() {
                name = Some(rest.to_string());
            }
        }
        if mach.is_none() {
            mach = header_value(line, "Mach =");
        }
        if reynolds.is_none() {
            reynolds = header_value(line, "Re =");
        }
        if line.trim_start().starts_with("alpha") {
            title = Some(i);
            break;
        }
    }
    let mach = mach.ok_or(Error::MissingHeader("Mach ="))?;
    let reynolds = reynolds.ok_or(Error::MissingHeader("Re ="))?;
    let title = title.ok_or(Error::MissingHeader("alpha column title"))?;
    let separator = lines
        .iter()
        .enumerate()
        .skip(title + 1)
        .find(|(_, l)| !l.trim().is_empty())
        .filter(|(_, l)| l.trim_start().starts_with("---"))
        .map(|(i, _)| i)
        .ok_or(Error::MissingHeader("dashed separator"))?;

    let mut points = Vec::new();
    for (i, line) in lines.iter().enumerate().skip(separator + 1) {
        if line.trim().is_empty() {
            continue;
        }
        let malformed = || Error::MalformedRow {
            line: i + 1,
            content: line.to_string(),
        };
        let mut cols = line.split_whitespace().map(|t| t.parse::<f64>());
        match (cols.next(), cols.next()) {
            (Some(Ok(alpha)), Some(Ok(cl))) if cols.all(|c| c.is_ok()) => points.push((alpha, cl)),
            _ => return Err(malformed()),
        }
    }
    Ok(Polar {
        name,
        mach,
        reynolds,
        points,
    })
}

// Reads the number after `key`, accepting the spaced exponent form
// `1.000 e 6` as well as `1.0e6`.
fn header_value(line: &str, key: &str) -> Option<f64> {
    let (_, rest) = line.split_once(key)?;
    let mut tokens = rest.split_whitespace();
    let mantissa = tokens.next()?;
    if let Ok(v) = mantissa.parse::<f64>() {
        let mut peek = tokens.clone();
        if peek.next() == Some("e") {
            if let Some(exp) = peek.next().and_then(|t| t.parse::<i32>().ok()) {
                return Some(v * 10f64.powi(exp));
            }
        }
        return Some(v);
    }
    None
}

/// Writes a polar in the same fixed-column layout [`parse_polar`] reads.
/// Alpha is written with 3 decimals and CL with 4.
pub fn write_polar(p: &Polar) -> String {
    let exp = if p.reynolds > 0.0 { p.reynolds.log10().floor() as i32 } else { 0 };
    let mantissa = p.reynolds / 10f64.powi(exp);
    let mut out = String::from("\n       XFOIL         Version 6.99\n\n");
    out.push_str(&format!(
        " Calculated polar for: {}\n\n",
        p.name.as_deref().unwrap_or("")
    ));
    out.push_str(" 1 1 Reynolds number fixed          Mach number fixed\n\n");
    out.push_str(&format!(
        " Mach = {:7.3}     Re = {:9.3} e {}     Ncrit =   9.000\n\n",
        p.mach, mantissa, exp
    ));
    out.push_str("   alpha    CL        CD       CDp       CM     Top_Xtr  Bot_Xtr\n");
    out.push_str("  ------ -------- --------- --------- -------- -------- --------\n");
    for &(alpha, cl) in &p.points {
        out.push_str(&format!(
            "  {alpha:6.3}  {cl:7.4}   0.00000   0.00000   0.0000   1.0000   1.0000\n"
        ));
    }
    out
}

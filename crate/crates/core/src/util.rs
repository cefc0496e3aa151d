//! Small formatting and hashing helpers shared by the file writers.

use sha2::{Digest, Sha256};

/// Formats `x` with `digits` significant digits, `%g` style: fixed notation
/// for moderate magnitudes, scientific otherwise, trailing zeros trimmed.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    assert!(digits >= 1);
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { format!("{x}") };
    }
    // Exponent after rounding to the requested precision.
    let sci = format!("{:.*e}", digits - 1, x);
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if exp < -5 || exp >= digits as i32 {
        let (mantissa, e) = sci.split_at(sci.find('e').unwrap());
        return format!("{}{}", trim_zeros(mantissa), e);
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, x)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Round-trip exact rendering of an f64 (17 significant digits).
pub fn fmt_exact(x: f64) -> String {
    format!("{:.16e}", x)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(0.0, 6), "0");
        assert_eq!(fmt_sig(1.0, 6), "1");
        assert_eq!(fmt_sig(0.25, 6), "0.25");
        assert_eq!(fmt_sig(0.123456789, 6), "0.123457");
        assert_eq!(fmt_sig(0.749999999, 6), "0.75");
        assert_eq!(fmt_sig(1.5e-7, 6), "1.5e-7");
        assert_eq!(fmt_sig(-2.0 / 3.0, 10), "-0.6666666667");
        assert_eq!(fmt_sig(1234567.0, 6), "1.23457e6");
    }

    #[test]
    fn exact_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02e23, f64::MIN_POSITIVE] {
            assert_eq!(fmt_exact(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn hash_is_hex() {
        let h = sha256_hex(b"abc");
        assert_eq!(h, "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}

//! Exact rational degrees.
//!
//! Degree comparisons (membership in the degree set, adjacency around 1)
//! must not suffer floating ties, so roughness parameters and truncation
//! degrees are held as `Rational64` throughout. Floating inputs are snapped
//! to a nearby small-denominator rational by continued fractions.

use num::rational::Rational64;
use num::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Largest denominator accepted when snapping a float to a rational.
const MAX_DEN: i64 = 1_000_000;

/// Snap a finite float to the rational it most plausibly denotes.
///
/// Runs the continued-fraction expansion of `x` and stops at the first
/// convergent within `tol`. Returns `None` for non-finite input or when no
/// convergent with denominator <= 10^6 is close enough.
pub fn rational_from_f64(x: f64, tol: f64) -> Option<Rational64> {
    if !x.is_finite() {
        return None;
    }
    if x == 0.0 {
        return Some(Rational64::zero());
    }
    let sign = if x < 0.0 { -1 } else { 1 };
    let mut v = x.abs();
    // convergents p/q
    let (mut p0, mut q0, mut p1, mut q1) = (1i64, 0i64, v.floor() as i64, 1i64);
    v -= v.floor();
    for _ in 0..40 {
        let approx = p1 as f64 / q1 as f64;
        if (approx - x.abs()).abs() <= tol {
            return Some(Rational64::new(sign * p1, q1));
        }
        if v.abs() < 1e-18 {
            break;
        }
        v = 1.0 / v;
        let a = v.floor();
        if a >= MAX_DEN as f64 {
            break;
        }
        v -= a;
        let a = a as i64;
        let p2 = a.checked_mul(p1)?.checked_add(p0)?;
        let q2 = a.checked_mul(q1)?.checked_add(q0)?;
        if q2 > MAX_DEN {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
    let approx = p1 as f64 / q1 as f64;
    if (approx - x.abs()).abs() <= tol {
        Some(Rational64::new(sign * p1, q1))
    } else {
        None
    }
}

/// Parse a rational from "a/b", an integer literal, or a decimal literal.
pub fn parse_ratio(s: &str) -> Result<Rational64> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: i64 = num
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
        let d: i64 = den
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
        if d == 0 {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational64::new(n, d));
    }
    if let Ok(n) = s.parse::<i64>() {
        return Ok(Rational64::from_integer(n));
    }
    let x: f64 = s
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    rational_from_f64(x, 1e-12)
        .ok_or_else(|| Error::Parse(format!("{s:?} is not close to a small rational")))
}

/// Canonical display: "a" when integral, "a/b" otherwise.
pub fn format_ratio(r: Rational64) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn ratio_to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Ceiling of a positive rational as usize.
pub fn ratio_ceil(r: Rational64) -> usize {
    debug_assert!(!r.is_negative());
    let c = r.ceil();
    *c.numer() as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snaps_common_values() {
        assert_eq!(rational_from_f64(1.5, 1e-12), Some(Rational64::new(3, 2)));
        assert_eq!(rational_from_f64(2.0, 1e-12), Some(Rational64::new(2, 1)));
        assert_eq!(
            rational_from_f64(1.0 / 3.0, 1e-12),
            Some(Rational64::new(1, 3))
        );
        assert_eq!(rational_from_f64(0.0, 1e-12), Some(Rational64::zero()));
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_ratio("3/2").unwrap(), Rational64::new(3, 2));
        assert_eq!(parse_ratio("2").unwrap(), Rational64::new(2, 1));
        assert_eq!(parse_ratio("1.5").unwrap(), Rational64::new(3, 2));
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio("abc").is_err());
    }

    #[test]
    fn formats_canonically() {
        assert_eq!(format_ratio(Rational64::new(3, 2)), "3/2");
        assert_eq!(format_ratio(Rational64::new(4, 2)), "2");
    }
}

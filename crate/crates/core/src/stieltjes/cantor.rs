//! The Cantor function, evaluated from the exact ternary expansion of its
//! (binary floating-point) argument.

use num_bigint::BigUint;

use crate::error::{Error, Result};

pub const DEFAULT_CANTOR_DEPTH: u32 = 64;

/// Cantor function `C(t)` on `[0, 1]`.
///
/// Scans the ternary digits of `t` up to `depth`, stops at the first digit 1
/// and maps the preceding 0/2 digits to binary 0/1. The digits are those of
/// the exact dyadic rational stored in `t`, so no rounding enters the digit
/// scan. Truncation error is at most `2^-depth`.
pub fn cantor_eval(t: f64, depth: u32) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::OutOfDomain { t, a: 0.0, b: 1.0 });
    }
    if depth == 0 {
        return Err(Error::InvalidArgument("Cantor depth must be positive".into()));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    if t == 1.0 {
        return Ok(1.0);
    }
    let (mantissa, shift) = dyadic_parts(t);
    let digits = if shift <= 124 {
        ternary_digits_u128(mantissa, shift, depth)
    } else {
        ternary_digits_big(mantissa, shift, depth)
    };
    let mut value = 0.0;
    let mut bit = 0.5;
    for d in digits {
        match d {
            0 => {}
            1 => return Ok(value + bit),
            _ => value += bit,
        }
        bit *= 0.5;
    }
    Ok(value)
}

/// Writes `t` in `(0, 1)` as `mantissa / 2^shift` with `mantissa` odd.
fn dyadic_parts(t: f64) -> (u64, u32) {
    let bits = t.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mut mantissa, mut shift) = if exp == 0 {
        (frac, 1074i64)
    } else {
        (frac | (1u64 << 52), 1075 - exp)
    };
    let tz = mantissa.trailing_zeros() as i64;
    mantissa >>= tz;
    shift -= tz;
    (mantissa, shift as u32)
}

fn ternary_digits_u128(mantissa: u64, shift: u32, depth: u32) -> Vec<u8> {
    let mask = (1u128 << shift) - 1;
    let mut x = mantissa as u128;
    let mut out = Vec::with_capacity(depth as usize);
    for _ in 0..depth {
        x *= 3;
        let d = (x >> shift) as u8;
        x &= mask;
        out.push(d);
        if d == 1 || x == 0 {
            break;
        }
    }
    out
}

fn ternary_digits_big(mantissa: u64, shift: u32, depth: u32) -> Vec<u8> {
    let denom = BigUint::from(1u8) << shift;
    let mut x = BigUint::from(mantissa);
    let mut out = Vec::with_capacity(depth as usize);
    for _ in 0..depth {
        x *= 3u8;
        let d = if x >= &denom * 2u8 {
            2
        } else if x >= denom {
            1
        } else {
            0
        };
        if d > 0 {
            x -= &denom * BigUint::from(d);
        }
        out.push(d);
        if d == 1 || x == BigUint::ZERO {
            break;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: f64 = f64::EPSILON;

    #[test]
    fn endpoints() {
        assert_eq!(cantor_eval(0.0, 64).unwrap(), 0.0);
        assert_eq!(cantor_eval(1.0, 64).unwrap(), 1.0);
    }

    #[test]
    fn third_maps_to_half() {
        // the double nearest 1/3 is 1/3 − 1/(3·2⁵⁴); Hölder continuity with
        // exponent log 2 / log 3 bounds how far below ½ its value may sit
        let c = cantor_eval(1.0 / 3.0, 64).unwrap();
        let gap = (1.0 / (3.0 * 2f64.powi(54))).powf(2f64.ln() / 3f64.ln());
        assert!(c < 0.5 && 0.5 - c <= 2.0 * gap, "{c}");
        assert_eq!(cantor_eval(2.0 / 3.0, 64).unwrap(), 0.5);
        assert_eq!(cantor_eval(0.5, 64).unwrap(), 0.5);
    }

    #[test]
    fn quarter_maps_to_third() {
        // 1/4 = 0.020202..._3 -> 0.010101..._2
        let v = cantor_eval(0.25, 64).unwrap();
        assert!((v - 1.0 / 3.0).abs() <= 2.0f64.powi(-64) + EPS, "{v}");
        assert!((cantor_eval(0.75, 64).unwrap() - 2.0 / 3.0).abs() <= 2.0 * EPS);
    }

    #[test]
    fn depth_bounds_error() {
        let exact = 1.0 / 3.0;
        for depth in [1u32, 2, 5, 10, 20] {
            let v = cantor_eval(0.25, depth).unwrap();
            assert!((v - exact).abs() <= 2.0f64.powi(-(depth as i32)) + EPS);
        }
    }

    #[test]
    fn tiny_arguments_use_wide_arithmetic() {
        // 3^-60 lies well below 2^-72, forcing the BigUint path
        let t = 3.0f64.powi(-60) * 2.0;
        let v = cantor_eval(t, 64).unwrap();
        // digits: 59 zeros then a 2 (up to rounding of t) -> about 2^-60
        assert!(v > 0.0 && v < 2.0f64.powi(-58), "{v}");
        assert_eq!(cantor_eval(1e-300, 64).unwrap(), 0.0);
        assert_eq!(cantor_eval(f64::MIN_POSITIVE / 4.0, 64).unwrap(), 0.0);
    }

    #[test]
    fn rejects_outside_unit_interval() {
        assert!(cantor_eval(-0.1, 64).is_err());
        assert!(cantor_eval(1.5, 64).is_err());
        assert!(cantor_eval(0.5, 0).is_err());
    }
}

//! Exact rational arithmetic helpers.
//!
//! All volumes, influences, and bound values in this crate are
//! arbitrary-precision rationals in canonical reduced form (gcd 1, positive
//! denominator); decimal strings are rendered for display only and never feed
//! back into comparisons.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Signed, ToPrimitive, Zero};
use serde::Serialize;

pub type Rational = BigRational;

/// Shorthand constructor from machine integers. Panics on a zero denominator.
pub fn rational(num: i64, den: i64) -> Rational {
    assert!(den != 0, "zero denominator");
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// `count / base^exp`, the canonical form of every grid measurement.
pub fn cells_fraction(count: u64, base: u32, exp: u32) -> Rational {
    Rational::new(BigInt::from(count), BigInt::from(base).pow(exp))
}

pub fn rational_pow(r: &Rational, exp: u32) -> Rational {
    Rational::new(r.numer().pow(exp), r.denom().pow(exp))
}

/// Exact ceiling as a big integer.
pub fn rational_ceil(r: &Rational) -> BigInt {
    r.ceil().to_integer()
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Floor of the integer square root.
pub fn isqrt_u64(v: u64) -> u64 {
    if v < 2 {
        return v;
    }
    let mut x = (v as f64).sqrt() as u64;
    while x.checked_mul(x).is_none_or(|s| s > v) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|s| s <= v) {
        x += 1;
    }
    x
}

/// Renders `r` as a plain decimal string with `sig` significant digits,
/// rounding ties away from zero. Exact integer-only arithmetic; the result is
/// identical on every platform.
pub fn decimal_string(r: &Rational, sig: u32) -> String {
    assert!(sig >= 1);
    if r.is_zero() {
        return "0".to_string();
    }
    let neg = r.is_negative();
    let a = r.abs();
    let p = a.numer().clone();
    let q = a.denom().clone();

    // Number of digits in the integer part (0 when a < 1).
    let int_digits = {
        let int_part = &p / &q;
        if int_part.is_zero() {
            0u32
        } else {
            int_part.to_string().len() as u32
        }
    };

    let ten = BigInt::from(10);
    let two = BigInt::from(2);
    let half_round = |num: BigInt, den: BigInt| -> BigInt {
        // floor(num/den + 1/2) for positive den
        (num * &two + &den).div_floor(&(den * &two))
    };

    let mut body = if int_digits >= sig {
        // Value >= 10^(sig-1): round to an integer multiple of 10^(int_digits-sig).
        let scale = ten.pow(int_digits - sig);
        let v = half_round(p, q * &scale);
        (v * scale).to_string()
    } else if int_digits > 0 {
        let frac = sig - int_digits;
        let v = half_round(p * ten.pow(frac), q);
        let s = v.to_string();
        // Rounding may add a digit (9.9995 -> 10.00); keep the full string and
        // place the point `frac` digits from the right either way.
        let cut = s.len() - frac as usize;
        format!("{}.{}", &s[..cut], &s[cut..])
    } else {
        // a < 1: locate the first significant digit.
        let mut zeros = 0u32;
        let mut scaled = &p * &ten;
        while scaled < q {
            scaled *= &ten;
            zeros += 1;
        }
        let v = half_round(p * ten.pow(zeros + sig), q);
        let s = v.to_string();
        if s.len() as u32 > sig {
            // Carried over (0.09996 @3 -> 100 with zeros=1 means 0.100... shift).
            if zeros == 0 {
                format!("{}.{}", &s[..1], &s[1..s.len() - 1])
            } else {
                format!("0.{}{}", "0".repeat(zeros as usize - 1), &s[..s.len() - 1])
            }
        } else {
            format!("0.{}{}", "0".repeat(zeros as usize), s)
        }
    };

    if neg {
        body.insert(0, '-');
    }
    body
}

/// JSON form of an exact rational: numerator/denominator strings plus a
/// six-significant-digit decimal for humans.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct RationalJson {
    pub num: String,
    pub den: String,
    pub decimal: String,
}

impl From<&Rational> for RationalJson {
    fn from(r: &Rational) -> Self {
        RationalJson {
            num: r.numer().to_string(),
            den: r.denom().to_string(),
            decimal: decimal_string(r, 6),
        }
    }
}

pub fn one() -> Rational {
    Rational::one()
}

pub fn zero() -> Rational {
    Rational::zero()
}

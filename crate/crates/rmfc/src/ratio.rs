//! Exact rational helpers on top of `BigRational`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar used everywhere.
pub type Q = BigRational;

/// Integer as a rational.
pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// `n / d` as a rational. Panics on `d == 0`.
pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// `base^e` for any integer exponent (base must be nonzero when `e < 0`).
pub fn pow(base: &Q, e: i64) -> Q {
    let mut acc = Q::one();
    let mut b = if e < 0 { base.recip() } else { base.clone() };
    let mut k = e.unsigned_abs();
    while k > 0 {
        if k & 1 == 1 {
            acc *= &b;
        }
        b = &b * &b;
        k >>= 1;
    }
    acc
}

/// Smallest integer `j` with `base^j >= x`, for `base > 1` and `x > 0`.
pub fn ceil_log(base: &Q, x: &Q) -> i64 {
    assert!(*base > Q::one() && x.is_positive());
    let mut j: i64 = 0;
    let mut p = Q::one();
    if p >= *x {
        let inv = base.recip();
        loop {
            let next = &p * &inv;
            if next < *x {
                return j;
            }
            p = next;
            j -= 1;
        }
    }
    while p < *x {
        p *= base;
        j += 1;
    }
    j
}

/// Largest integer not above `x`.
pub fn floor(x: &Q) -> BigInt {
    x.numer().div_floor(x.denom())
}

/// Smallest integer not below `x`.
pub fn ceil(x: &Q) -> BigInt {
    -(-x.numer()).div_floor(x.denom())
}

/// `floor(x)` as `i64`; saturates on overflow.
pub fn floor_i64(x: &Q) -> i64 {
    floor(x).to_i64().unwrap_or(if x.is_negative() { i64::MIN } else { i64::MAX })
}

/// `ceil(x)` as `i64`; saturates on overflow.
pub fn ceil_i64(x: &Q) -> i64 {
    ceil(x).to_i64().unwrap_or(if x.is_negative() { i64::MIN } else { i64::MAX })
}

/// Largest multiple of `m` not above `x` (`m > 0`).
pub fn floor_to(x: &Q, m: &Q) -> Q {
    Q::from_integer(floor(&(x / m))) * m
}

/// Smallest multiple of `m` not below `x` (`m > 0`).
pub fn ceil_to(x: &Q, m: &Q) -> Q {
    Q::from_integer(ceil(&(x / m))) * m
}

/// Parses `p`, `p/q`, or a finite decimal such as `-1.25` exactly.
pub fn parse_q(s: &str) -> Result<Q> {
    let bad = || Error::MalformedInput(format!("not a rational: {s:?}"));
    let s = s.trim();
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = parse_int(n).ok_or_else(bad)?;
        let d: BigInt = parse_int(d).ok_or_else(bad)?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Q::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let int_digits = int.strip_prefix(['-', '+']).unwrap_or(int);
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        if !int_digits.bytes().all(|b| b.is_ascii_digit()) || (int_digits.is_empty() && frac.is_empty()) {
            return Err(bad());
        }
        let whole: BigInt = if int_digits.is_empty() { BigInt::zero() } else { int_digits.parse().map_err(|_| bad())? };
        let f: BigInt = frac.parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let v = Q::new(whole * &scale + f, scale);
        return Ok(if neg { -v } else { v });
    }
    Ok(Q::from_integer(parse_int(s).ok_or_else(bad)?))
}

fn parse_int(s: &str) -> Option<BigInt> {
    let t = s.strip_prefix(['-', '+']).unwrap_or(s);
    if t.is_empty() || t.len() > 4096 || !t.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Renders `x` as `p` or `p/q`.
pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ceil_log_straddles() {
        assert_eq!(ceil_log(&qf(3, 2), &q(400)), 15);
        assert_eq!(ceil_log(&q(2), &q(3)), 2);
        assert_eq!(ceil_log(&q(2), &q(4)), 2);
        assert_eq!(ceil_log(&q(2), &q(1)), 0);
        assert_eq!(ceil_log(&q(2), &qf(1, 3)), -1);
        assert_eq!(ceil_log(&q(2), &qf(1, 4)), -2);
    }

    #[test]
    fn floor_ceil_negative() {
        assert_eq!(floor(&qf(-1, 2)), BigInt::from(-1));
        assert_eq!(ceil(&qf(-1, 2)), BigInt::from(0));
        assert_eq!(ceil(&qf(7, 2)), BigInt::from(4));
        assert_eq!(floor_to(&qf(3, 10), &qf(1, 8)), qf(1, 4));
        assert_eq!(ceil_to(&qf(3, 10), &qf(1, 8)), qf(3, 8));
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_q("1/3").unwrap(), qf(1, 3));
        assert_eq!(parse_q("-1.25").unwrap(), qf(-5, 4));
        assert_eq!(parse_q("0.5").unwrap(), qf(1, 2));
        assert_eq!(parse_q("7").unwrap(), q(7));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("abc").is_err());
        assert!(parse_q("1.").is_err());
        assert!(parse_q("").is_err());
        assert_eq!(fmt_q(&qf(6, 4)), "3/2");
    }

    #[test]
    fn pow_negative_exponent() {
        assert_eq!(pow(&q(2), -3), qf(1, 8));
        assert_eq!(pow(&qf(3, 2), 2), qf(9, 4));
    }
}

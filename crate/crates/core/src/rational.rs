//! Exact rational scalars shared by every module.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Exact rational number. No floating point is used for any measure,
/// density or lattice value.
pub type Q = BigRational;

pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qu(n: u64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn zero() -> Q {
    Q::zero()
}

pub fn one() -> Q {
    Q::one()
}

/// `r^n` for a non-negative exponent.
pub fn pow(r: &Q, n: u64) -> Q {
    let mut base = r.clone();
    let mut acc = Q::one();
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    acc
}

/// Formats a rational as `p/q`, or `p` when the denominator is one.
pub struct Rat<'a>(pub &'a Q);

impl fmt::Display for Rat<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

pub fn fmt_q(x: &Q) -> String {
    Rat(x).to_string()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal `{0}`")]
pub struct ParseRationalError(pub String);

/// Parses `p`, `-p`, `p/q` (whitespace around `/` is allowed).
pub fn parse_q(s: &str) -> Result<Q, ParseRationalError> {
    let err = || ParseRationalError(s.to_string());
    let t = s.trim();
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| err())?;
    let d: BigInt = d.parse().map_err(|_| err())?;
    if d.is_zero() {
        return Err(err());
    }
    Ok(Q::new(n, d))
}

/// Lossy conversion used only to steer threshold searches; every decision
/// made from it is re-verified exactly.
pub fn approx_ln(x: &Q) -> f64 {
    fn ln_big(b: &BigInt) -> f64 {
        let bits = b.bits();
        if bits < 1000 {
            let (_, digits) = b.to_u64_digits();
            let mut v = 0f64;
            for d in digits.iter().rev() {
                v = v * 18446744073709551616.0 + *d as f64;
            }
            v.ln()
        } else {
            let shift = bits - 64;
            let top: BigInt = b >> shift;
            ln_big(&top) + shift as f64 * std::f64::consts::LN_2
        }
    }
    let a = x.abs();
    ln_big(a.numer()) - ln_big(a.denom())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        assert_eq!(parse_q("3/4").unwrap(), q(3, 4));
        assert_eq!(parse_q(" -2 / 6 ").unwrap(), q(-1, 3));
        assert_eq!(parse_q("7").unwrap(), qi(7));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
        assert_eq!(fmt_q(&q(-2, 6)), "-1/3");
        assert_eq!(fmt_q(&qi(5)), "5");
    }

    #[test]
    fn pow_matches_repeated_product() {
        let r = q(2, 3);
        let mut acc = one();
        for n in 0..20u64 {
            assert_eq!(pow(&r, n), acc);
            acc *= &r;
        }
    }

    #[test]
    fn approx_ln_close() {
        assert!((approx_ln(&q(1, 2)) + std::f64::consts::LN_2).abs() < 1e-12);
        let big = pow(&qi(3), 2000);
        assert!((approx_ln(&big) - 2000.0 * 3f64.ln()).abs() < 1e-6);
    }
}

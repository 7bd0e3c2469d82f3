//! Exact rational arithmetic helpers.
//!
//! All weights and gap widths are `BigRational`; nothing in the library uses
//! floating point. Rationals serialize as `"p/q"` strings (`"p"` when q = 1).

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

use crate::error::{ArcError, Result};

pub type Q = BigRational;

/// Shorthand for a rational from two machine integers.
pub fn q(num: i64, den: i64) -> Q {
    assert!(den != 0, "zero denominator");
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(num: i64) -> Q {
    BigRational::from(BigInt::from(num))
}

pub fn is_positive(x: &Q) -> bool {
    x.is_positive()
}

/// Canonical `"p/q"` rendering (reduced, `"p"` if the denominator is one).
pub fn format_ratio(x: &Q) -> String {
    if x.denom().is_one() {
        format!("{}", x.numer())
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parse the canonical `"p/q"` rendering.
pub fn parse_ratio(s: &str) -> Result<Q> {
    let bad = || ArcError::Malformed {
        reason: format!("invalid rational literal {s:?}"),
    };
    let mut parts = s.splitn(2, '/');
    let numer: BigInt = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
    let denom: BigInt = match parts.next() {
        Some(d) => d.parse().map_err(|_| bad())?,
        None => BigInt::one(),
    };
    if denom.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(numer, denom))
}

/// `x mod 1`, normalized into `[0, 1)`.
pub fn mod_one(x: &Q) -> Q {
    let f = x.floor();
    x - f
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_roundtrip() {
        for s in ["0", "-3", "1/2", "-7/3", "22/7"] {
            let r = parse_ratio(s).unwrap();
            assert_eq!(format_ratio(&r), s);
        }
        // Non-canonical inputs parse but re-render reduced.
        assert_eq!(format_ratio(&parse_ratio("4/2").unwrap()), "2");
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio("x").is_err());
    }

    #[test]
    fn mod_one_range() {
        assert_eq!(mod_one(&q(7, 5)), q(2, 5));
        assert_eq!(mod_one(&q(-1, 5)), q(4, 5));
        assert_eq!(mod_one(&qi(3)), qi(0));
    }
}

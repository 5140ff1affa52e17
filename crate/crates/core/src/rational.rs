//! Exact rational heights.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number used for every height in the engine.
pub type Q = BigRational;

pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn zero() -> Q {
    Q::zero()
}

pub fn one() -> Q {
    Q::one()
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| Error::Parse(format!("bad rational `{s}`")))?;
            let d: BigInt = d.trim().parse().map_err(|_| Error::Parse(format!("bad rational `{s}`")))?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in `{s}`")));
            }
            Ok(Q::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().map_err(|_| Error::Parse(format!("bad rational `{s}`")))?;
            Ok(Q::from_integer(n))
        }
    }
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Fractional part in `[0, 1)`.
pub fn frac(x: &Q) -> Q {
    x - x.floor()
}

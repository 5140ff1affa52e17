//! Symbolic circle offsets.
//!
//! An offset is stored as `turns + irr * IRR` full turns, where `turns` is an
//! exact rational reduced into `[0, 1)` and `IRR = (sqrt 5 - 1) / 2` is the one
//! designated irrational amount. Because `IRR` is irrational, the offset is zero
//! exactly when both parts are zero, which is decidable without tolerances.

use std::f64::consts::TAU;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::rational::{frac, parse_q, to_f64, zero, Q};
use num_bigint::BigInt;
use num_traits::Zero;

/// The designated irrational rotation, as a fraction of a full turn.
pub const IRR_TURNS: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymbolicAngle {
    turns: Q,
    irr: i64,
}

impl SymbolicAngle {
    pub fn zero() -> Self {
        Self { turns: zero(), irr: 0 }
    }

    /// One designated irrational rotation.
    pub fn irr() -> Self {
        Self { turns: zero(), irr: 1 }
    }

    pub fn from_turns(turns: Q) -> Self {
        Self { turns: frac(&turns), irr: 0 }
    }

    pub fn new(turns: Q, irr: i64) -> Self {
        Self { turns: frac(&turns), irr }
    }

    /// Parses `"irr"` or a rational number of turns such as `"1/3"`.
    pub fn parse(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("irr") {
            Ok(Self::irr())
        } else {
            Ok(Self::from_turns(parse_q(s)?))
        }
    }

    pub fn turns(&self) -> &Q {
        &self.turns
    }

    pub fn irr_coefficient(&self) -> i64 {
        self.irr
    }

    pub fn is_zero(&self) -> bool {
        self.turns.is_zero() && self.irr == 0
    }

    pub fn has_irrational_part(&self) -> bool {
        self.irr != 0
    }

    /// `k * self`; `None` when the irrational coefficient overflows.
    pub fn scale(&self, k: i64) -> Option<Self> {
        Some(Self {
            turns: frac(&(&self.turns * Q::from_integer(BigInt::from(k)))),
            irr: self.irr.checked_mul(k)?,
        })
    }

    pub fn add(&self, other: &Self) -> Option<Self> {
        Some(Self {
            turns: frac(&(&self.turns + &other.turns)),
            irr: self.irr.checked_add(other.irr)?,
        })
    }

    /// Numerical value in `[0, 2π)`.
    pub fn radians(&self) -> f64 {
        let t = to_f64(&self.turns) + (self.irr as f64 * IRR_TURNS).rem_euclid(1.0);
        (t.rem_euclid(1.0)) * TAU
    }
}

impl fmt::Display for SymbolicAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.turns.is_zero(), self.irr) {
            (true, 0) => write!(f, "0"),
            (true, 1) => write!(f, "irr"),
            (true, k) => write!(f, "{k}*irr"),
            (false, 0) => write!(f, "{}", self.turns),
            (false, k) => write!(f, "{}+{k}*irr", self.turns),
        }
    }
}

impl Serialize for SymbolicAngle {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SymbolicAngle {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_display(&s).map_err(serde::de::Error::custom)
    }
}

/// Inverse of `Display`, which adds the `a+k*irr` and `k*irr` forms to `parse`.
fn parse_display(s: &str) -> Result<SymbolicAngle> {
    let s = s.trim();
    let (rational, irr) = match s.split_once('+') {
        Some((r, i)) => (Some(r), Some(i)),
        None if s.ends_with("irr") => (None, Some(s)),
        None => (Some(s), None),
    };
    let turns = match rational {
        Some(r) => parse_q(r)?,
        None => zero(),
    };
    let k = match irr {
        None => 0,
        Some(i) if i.eq_ignore_ascii_case("irr") => 1,
        Some(i) => i
            .trim_end_matches("irr")
            .trim_end_matches('*')
            .parse::<i64>()
            .map_err(|_| crate::error::Error::Parse(format!("bad angle `{s}`")))?,
    };
    Ok(SymbolicAngle::new(turns, k))
}

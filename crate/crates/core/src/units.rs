//! Currency amounts and signed fixed-point numbers.
//!
//! Money is always an integer count of the smallest denomination. Ratios such
//! as the reputation score and the cost-scaling factor are fixed-point values
//! on a 10^-6 grid; every division rounds half-up (towards +inf on ties).

use std::fmt;
use std::ops::{Add, AddAssign, Sub};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Fixed-point denominator.
pub const SCALE: i64 = 1_000_000;

/// Integer division of `num / den` rounding half-up. `den` must be positive.
pub(crate) fn div_round_half_up(num: i128, den: i128) -> i128 {
    debug_assert!(den > 0);
    // floor((2*num + den) / (2*den))
    (2 * num + den).div_euclid(2 * den)
}

/// A non-negative currency amount in the smallest denomination.
///
/// Serialized as a decimal string so exported files never lose precision.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Amount(pub u64);

impl Amount {
    pub const ZERO: Amount = Amount(0);

    pub fn units(self) -> u64 {
        self.0
    }

    pub fn checked_sub(self, rhs: Amount) -> Option<Amount> {
        self.0.checked_sub(rhs.0).map(Amount)
    }

    pub fn saturating_sub(self, rhs: Amount) -> Amount {
        Amount(self.0.saturating_sub(rhs.0))
    }

    pub fn checked_add(self, rhs: Amount) -> Option<Amount> {
        self.0.checked_add(rhs.0).map(Amount)
    }

    pub fn times(self, n: u64) -> Amount {
        Amount(self.0.saturating_mul(n))
    }

    /// `self * num / den`, rounded half-up.
    pub fn scale_ratio(self, num: u64, den: u64) -> Amount {
        let v = div_round_half_up(self.0 as i128 * num as i128, den as i128);
        Amount(v.clamp(0, u64::MAX as i128) as u64)
    }
}

impl Add for Amount {
    type Output = Amount;
    fn add(self, rhs: Amount) -> Amount {
        Amount(self.0.checked_add(rhs.0).expect("currency overflow"))
    }
}

impl AddAssign for Amount {
    fn add_assign(&mut self, rhs: Amount) {
        *self = *self + rhs;
    }
}

impl Sub for Amount {
    type Output = Amount;
    fn sub(self, rhs: Amount) -> Amount {
        Amount(self.0.checked_sub(rhs.0).expect("currency underflow"))
    }
}

impl fmt::Display for Amount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Amount {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        // canonical decimal only: no sign, no leading zeros
        let canonical = !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()) && (s == "0" || !s.starts_with('0'));
        if !canonical {
            return Err(Error::Parse(format!("invalid amount {s:?}")));
        }
        s.parse::<u64>().map(Amount).map_err(|e| Error::Parse(format!("invalid amount {s:?}: {e}")))
    }
}

impl Serialize for Amount {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Amount {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Signed fixed-point number with six decimal places.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fixed(i64);

impl Fixed {
    pub const ZERO: Fixed = Fixed(0);
    pub const ONE: Fixed = Fixed(SCALE);

    pub const fn from_micros(micros: i64) -> Fixed {
        Fixed(micros)
    }

    pub const fn micros(self) -> i64 {
        self.0
    }

    /// `num / den` rounded half-up onto the grid.
    pub fn from_ratio(num: i64, den: i64) -> Fixed {
        assert!(den != 0, "zero denominator");
        let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
        Fixed(div_round_half_up(num as i128 * SCALE as i128, den as i128) as i64)
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / SCALE as f64
    }
}

impl fmt::Display for Fixed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        write!(f, "{sign}{}.{:06}", abs / SCALE as u64, abs % SCALE as u64)
    }
}

impl FromStr for Fixed {
    type Err = Error;

    /// Accepts only the canonical `[-]I.FFFFFF` form produced by `Display`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("invalid fixed-point value {s:?}"));
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (int, frac) = body.split_once('.').ok_or_else(bad)?;
        if int.is_empty() || frac.len() != 6 || !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let int: i64 = int.parse().map_err(|_| bad())?;
        let frac: i64 = frac.parse().map_err(|_| bad())?;
        let mag = int.checked_mul(SCALE).and_then(|v| v.checked_add(frac)).ok_or_else(bad)?;
        let value = Fixed(if neg { -mag } else { mag });
        if value.to_string() != s {
            return Err(bad());
        }
        Ok(value)
    }
}

impl Serialize for Fixed {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Fixed {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

//! Exact decimal costs stored as scaled 64-bit integers.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Sub};
use std::str::FromStr;

/// Number of fractional decimal digits kept by [`Cost`].
pub const FRACTION_DIGITS: u32 = 6;
/// One cost unit in scaled representation.
pub const COST_SCALE: i64 = 1_000_000;

/// A cost in millionths of a unit.
///
/// Parsing accepts an optional sign, an integer part and at most six
/// fractional digits. Display prints the shortest decimal that parses back to
/// the same value.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cost(pub i64);

impl Cost {
    pub const ZERO: Cost = Cost(0);

    /// Whole units, e.g. `Cost::units(3)` is `3.0`.
    pub fn units(units: i64) -> Cost {
        Cost(units.checked_mul(COST_SCALE).expect("cost overflow"))
    }

    pub fn scaled(self) -> i64 {
        self.0
    }

    pub fn checked_add(self, other: Cost) -> Option<Cost> {
        self.0.checked_add(other.0).map(Cost)
    }

    pub fn is_negative(self) -> bool {
        self.0 < 0
    }
}

impl Add for Cost {
    type Output = Cost;
    fn add(self, rhs: Cost) -> Cost {
        Cost(self.0 + rhs.0)
    }
}

impl AddAssign for Cost {
    fn add_assign(&mut self, rhs: Cost) {
        self.0 += rhs.0;
    }
}

impl Sub for Cost {
    type Output = Cost;
    fn sub(self, rhs: Cost) -> Cost {
        Cost(self.0 - rhs.0)
    }
}

impl Sum for Cost {
    fn sum<I: Iterator<Item = Cost>>(iter: I) -> Cost {
        iter.fold(Cost::ZERO, |a, b| a + b)
    }
}

impl<'a> Sum<&'a Cost> for Cost {
    fn sum<I: Iterator<Item = &'a Cost>>(iter: I) -> Cost {
        iter.copied().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CostParseError {
    #[error("empty cost")]
    Empty,
    #[error("invalid decimal `{0}`")]
    Invalid(String),
    #[error("more than {FRACTION_DIGITS} fractional digits in `{0}`")]
    TooPrecise(String),
    #[error("cost `{0}` out of range")]
    OutOfRange(String),
}

impl FromStr for Cost {
    type Err = CostParseError;

    fn from_str(s: &str) -> Result<Cost, CostParseError> {
        if s.is_empty() {
            return Err(CostParseError::Empty);
        }
        let invalid = || CostParseError::Invalid(s.to_string());
        let (negative, body) = match s.as_bytes()[0] {
            b'-' => (true, &s[1..]),
            b'+' => (false, &s[1..]),
            _ => (false, s),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(invalid());
        }
        if !int_part.bytes().all(|b| b.is_ascii_digit())
            || !frac_part.bytes().all(|b| b.is_ascii_digit())
        {
            return Err(invalid());
        }
        if frac_part.len() > FRACTION_DIGITS as usize {
            return Err(CostParseError::TooPrecise(s.to_string()));
        }
        let out_of_range = || CostParseError::OutOfRange(s.to_string());
        let mut value: i64 = 0;
        for b in int_part.bytes() {
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add(i64::from(b - b'0')))
                .ok_or_else(out_of_range)?;
        }
        value = value.checked_mul(COST_SCALE).ok_or_else(out_of_range)?;
        let mut frac: i64 = 0;
        for b in frac_part.bytes() {
            frac = frac * 10 + i64::from(b - b'0');
        }
        frac *= 10i64.pow(FRACTION_DIGITS - frac_part.len() as u32);
        value = value.checked_add(frac).ok_or_else(out_of_range)?;
        Ok(Cost(if negative { -value } else { value }))
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        let scale = COST_SCALE as u64;
        let (int, frac) = (abs / scale, abs % scale);
        if frac == 0 {
            return write!(f, "{sign}{int}");
        }
        let digits = format!("{frac:06}");
        write!(f, "{sign}{int}.{}", digits.trim_end_matches('0'))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_integers_and_fractions() {
        assert_eq!("1".parse::<Cost>().unwrap(), Cost(1_000_000));
        assert_eq!("0.5".parse::<Cost>().unwrap(), Cost(500_000));
        assert_eq!(".25".parse::<Cost>().unwrap(), Cost(250_000));
        assert_eq!("-2.000001".parse::<Cost>().unwrap(), Cost(-2_000_001));
        assert_eq!("3.".parse::<Cost>().unwrap(), Cost(3_000_000));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!("1.0000001".parse::<Cost>(), Err(CostParseError::TooPrecise(_))));
        assert!(matches!("1e3".parse::<Cost>(), Err(CostParseError::Invalid(_))));
        assert!(matches!("-".parse::<Cost>(), Err(CostParseError::Invalid(_))));
        assert!(matches!("".parse::<Cost>(), Err(CostParseError::Empty)));
        assert!(matches!(
            "99999999999999999999".parse::<Cost>(),
            Err(CostParseError::OutOfRange(_))
        ));
    }

    #[test]
    fn display_is_minimal() {
        assert_eq!(Cost::units(5).to_string(), "5");
        assert_eq!(Cost(1_500_000).to_string(), "1.5");
        assert_eq!(Cost(-1).to_string(), "-0.000001");
        assert_eq!(Cost(0).to_string(), "0");
    }

    proptest! {
        #[test]
        fn display_round_trips(raw in -(1i64 << 50)..(1i64 << 50)) {
            let c = Cost(raw);
            prop_assert_eq!(c.to_string().parse::<Cost>().unwrap(), c);
        }
    }
}

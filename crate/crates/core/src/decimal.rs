//! Fixed-point numbers that stay exact at cent precision.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Scale factor: four fractional digits.
pub const SCALE: i64 = 10_000;

const FRAC_DIGITS: usize = 4;

/// A 64-bit fixed-point decimal with four fractional digits.
///
/// Currency amounts, tolerances, and bracket bounds are compared and summed
/// without binary-float rounding. Sums and products are taken in 128-bit
/// intermediates where overflow could otherwise occur.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Decimal(i64);

#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid decimal {input:?}: {reason}")]
pub struct ParseDecimalError {
    pub input: String,
    pub reason: String,
}

impl Decimal {
    pub const ZERO: Decimal = Decimal(0);

    pub fn from_int(value: i64) -> Decimal {
        Decimal(value.saturating_mul(SCALE))
    }

    pub fn from_cents(cents: i64) -> Decimal {
        Decimal(cents.saturating_mul(SCALE / 100))
    }

    /// The underlying scaled integer (value × 10⁴).
    pub fn raw(self) -> i64 {
        self.0
    }

    pub fn from_raw(raw: i64) -> Decimal {
        Decimal(raw)
    }

    pub fn abs(self) -> Decimal {
        Decimal(self.0.abs())
    }

    pub fn is_negative(self) -> bool {
        self.0 < 0
    }

    /// True when the value has no fractional part.
    pub fn is_integral(self) -> bool {
        self.0 % SCALE == 0
    }

    /// Integer value, if integral.
    pub fn as_int(self) -> Option<i64> {
        if self.is_integral() {
            Some(self.0 / SCALE)
        } else {
            None
        }
    }

    pub fn checked_add(self, other: Decimal) -> Option<Decimal> {
        self.0.checked_add(other.0).map(Decimal)
    }

    pub fn checked_sub(self, other: Decimal) -> Option<Decimal> {
        self.0.checked_sub(other.0).map(Decimal)
    }

    /// Exact product. Two four-digit operands always yield a four-digit
    /// result, so no rounding is involved; `None` on i64 overflow.
    pub fn checked_mul(self, other: Decimal) -> Option<Decimal> {
        let wide = self.0 as i128 * other.0 as i128 / SCALE as i128;
        i64::try_from(wide).ok().map(Decimal)
    }

    /// Product in raw 128-bit units, for overflow-proof accumulation.
    pub fn mul_raw_wide(self, other: Decimal) -> i128 {
        self.0 as i128 * other.0 as i128 / SCALE as i128
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / SCALE as f64
    }
}

impl FromStr for Decimal {
    type Err = ParseDecimalError;

    fn from_str(s: &str) -> Result<Decimal, ParseDecimalError> {
        let err = |reason: &str| ParseDecimalError {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let (negative, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        if body.is_empty() {
            return Err(err("empty number"));
        }
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if int_part.is_empty() || !int_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err("non-numeric characters"));
        }
        if body.contains('.') && frac_part.is_empty() {
            return Err(err("trailing decimal point"));
        }
        if !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err("non-numeric characters"));
        }
        if frac_part.len() > FRAC_DIGITS {
            return Err(err("more than four decimal places"));
        }
        let int: i128 = int_part
            .parse()
            .map_err(|_| err("integer part overflows"))?;
        let mut frac: i128 = 0;
        if !frac_part.is_empty() {
            frac = frac_part.parse().map_err(|_| err("bad fraction"))?;
            for _ in frac_part.len()..FRAC_DIGITS {
                frac *= 10;
            }
        }
        let mut raw = int * SCALE as i128 + frac;
        if negative {
            raw = -raw;
        }
        i64::try_from(raw)
            .map(Decimal)
            .map_err(|_| err("value out of range"))
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let raw = self.0;
        let sign = if raw < 0 { "-" } else { "" };
        let abs = raw.unsigned_abs();
        let int = abs / SCALE as u64;
        let frac = abs % SCALE as u64;
        if frac == 0 {
            return write!(f, "{sign}{int}");
        }
        let mut digits = format!("{frac:04}");
        while digits.ends_with('0') {
            digits.pop();
        }
        write!(f, "{sign}{int}.{digits}")
    }
}

impl fmt::Debug for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Decimal({self})")
    }
}

// Serialized through the canonical text form so JSON carries exact values.
impl serde::Serialize for Decimal {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Decimal {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Decimal, D::Error> {
        let text = <String as serde::Deserialize>::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_plain_integers() {
        assert_eq!("1675".parse::<Decimal>().unwrap(), Decimal::from_int(1675));
        assert_eq!("-500".parse::<Decimal>().unwrap(), Decimal::from_int(-500));
    }

    #[test]
    fn parses_fractions_exactly() {
        assert_eq!("5.01".parse::<Decimal>().unwrap().raw(), 50_100);
        assert_eq!("1309.09".parse::<Decimal>().unwrap().raw(), 13_090_900);
        assert_eq!("0.0001".parse::<Decimal>().unwrap().raw(), 1);
    }

    #[test]
    fn rejects_garbage() {
        assert!("S500".parse::<Decimal>().is_err());
        assert!("".parse::<Decimal>().is_err());
        assert!("5.".parse::<Decimal>().is_err());
        assert!(".5".parse::<Decimal>().is_err());
        assert!("1.23456".parse::<Decimal>().is_err());
        assert!("1 675".parse::<Decimal>().is_err());
    }

    #[test]
    fn display_round_trips() {
        for s in ["0", "1675", "-500", "5.01", "0.25", "1309.09", "-0.0001"] {
            let d: Decimal = s.parse().unwrap();
            assert_eq!(d.to_string(), s);
            assert_eq!(d.to_string().parse::<Decimal>().unwrap(), d);
        }
    }

    #[test]
    fn multiplication_is_exact() {
        let count = Decimal::from_int(2);
        let bound = Decimal::from_int(40_000);
        assert_eq!(count.checked_mul(bound).unwrap(), Decimal::from_int(80_000));
        let half = "1.5".parse::<Decimal>().unwrap();
        assert_eq!(
            half.checked_mul(Decimal::from_int(40_000)).unwrap(),
            Decimal::from_int(60_000)
        );
    }

    #[test]
    fn boundary_comparison_is_exact() {
        let tol: Decimal = "5".parse().unwrap();
        let at: Decimal = "5".parse().unwrap();
        let over: Decimal = "5.01".parse().unwrap();
        assert!(at <= tol);
        assert!(over > tol);
    }
}

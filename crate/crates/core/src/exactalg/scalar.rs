//! Exact rational scalars.
//!
//! `BigRational` keeps itself reduced with a positive denominator, which is
//! exactly the invariant the rest of the crate relies on. The helpers here
//! pin down the textual `"num/den"` encoding used in every JSON file.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serializer};

use crate::error::{Error, Result};

pub type Scalar = BigRational;

pub fn int(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Scalar {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> Scalar {
    Scalar::zero()
}

pub fn one() -> Scalar {
    Scalar::one()
}

/// Always `num/den`, including integers (`3/1`) and zero (`0/1`).
pub fn to_string(s: &Scalar) -> String {
    format!("{}/{}", s.numer(), s.denom())
}

/// Accepts `num/den` or a bare integer. The result is reduced.
pub fn parse(text: &str) -> Result<Scalar> {
    let text = text.trim();
    let bad = || Error::Malformed(format!("not a rational: {text:?}"));
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

pub fn is_integer_valued(s: &Scalar) -> bool {
    s.denom().is_one()
}

pub fn abs(s: &Scalar) -> Scalar {
    s.abs()
}

/// serde adapter for a single scalar field.
pub mod serde_scalar {
    use super::*;

    pub fn serialize<S: Serializer>(
        value: &Scalar,
        ser: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&to_string(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<Scalar, D::Error> {
        let text = String::deserialize(de)?;
        parse(&text).map_err(serde::de::Error::custom)
    }
}

/// serde adapter for fixed-size arrays and nested arrays of scalars.
pub mod serde_scalar_vec {
    use super::*;

    pub fn serialize<S: Serializer>(
        value: &[Scalar],
        ser: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        ser.collect_seq(value.iter().map(to_string))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        de: D,
    ) -> std::result::Result<Vec<Scalar>, D::Error> {
        let texts = Vec::<String>::deserialize(de)?;
        texts
            .iter()
            .map(|t| parse(t).map_err(serde::de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encoding_is_always_a_fraction() {
        assert_eq!(to_string(&int(3)), "3/1");
        assert_eq!(to_string(&zero()), "0/1");
        assert_eq!(to_string(&ratio(6, -4)), "-3/2");
    }

    #[test]
    fn parse_reduces() {
        assert_eq!(parse("6/4").unwrap(), ratio(3, 2));
        assert_eq!(parse("-7").unwrap(), int(-7));
        assert_eq!(parse("0/5").unwrap(), zero());
        assert!(parse("1/0").is_err());
        assert!(parse("x").is_err());
    }
}

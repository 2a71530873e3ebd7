//! Exact rational scalars.
//!
//! Every quantity in this crate is an arbitrary-precision rational; all
//! comparisons are exact. Floating point is never used, because the
//! decisions taken downstream (facet incidence, norm equalities, functional
//! recovery) are equality-sensitive.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

/// Exact rational number in canonical reduced form.
pub type Scalar = BigRational;

/// Integer as a `Scalar`.
pub fn int(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

/// The fraction `num/den`. Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Scalar {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Parse a rational from a `"p/q"` or `"p"` string.
pub fn parse_scalar(s: &str) -> Result<Scalar, ScalarParseError> {
    s.trim()
        .parse::<BigRational>()
        .map_err(|_| ScalarParseError {
            input: s.to_string(),
        })
}

/// Render a rational as `"p/q"` (or `"p"` when the denominator is one).
pub fn format_scalar(x: &Scalar) -> String {
    x.to_string()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("not a rational number: {input:?} (expected \"p/q\" or \"p\")")]
pub struct ScalarParseError {
    pub input: String,
}

/// Parse a slice of `"p/q"` strings.
pub fn parse_scalars(items: &[String]) -> Result<Vec<Scalar>, ScalarParseError> {
    items.iter().map(|s| parse_scalar(s)).collect()
}

/// Uniform random rational `p/q` with `|p| <= max_abs_num` and
/// `1 <= q <= max_den`. Denominators are kept small so that products in
/// long test loops stay cheap.
pub fn random_scalar<R: Rng + ?Sized>(rng: &mut R, max_abs_num: i64, max_den: i64) -> Scalar {
    let p = rng.random_range(-max_abs_num..=max_abs_num);
    let q = rng.random_range(1..=max_den);
    rat(p, q)
}

/// Random rational in the closed interval `[0, 1]`.
pub fn random_unit_scalar<R: Rng + ?Sized>(rng: &mut R, max_den: i64) -> Scalar {
    let q = rng.random_range(1..=max_den);
    let p = rng.random_range(0..=q);
    rat(p, q)
}

/// Serde adapter rendering a single `Scalar` field as a `"p/q"` string;
/// use as `#[serde(with = "crate::scalar::serde_scalar")]`.
pub mod serde_scalar {
    use super::{format_scalar, parse_scalar, Scalar};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(x: &Scalar, s: S) -> Result<S::Ok, S::Error> {
        format_scalar(x).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Scalar, D::Error> {
        let raw = String::deserialize(d)?;
        parse_scalar(&raw).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for a table of scalars as rows of `"p/q"` strings;
/// use as `#[serde(with = "crate::scalar::serde_scalar_table")]`.
pub mod serde_scalar_table {
    use super::{format_scalar, parse_scalar, Scalar};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(t: &[Vec<Scalar>], s: S) -> Result<S::Ok, S::Error> {
        t.iter()
            .map(|row| row.iter().map(format_scalar).collect())
            .collect::<Vec<Vec<String>>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Scalar>>, D::Error> {
        let raw = Vec::<Vec<String>>::deserialize(d)?;
        raw.into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|s| parse_scalar(&s).map_err(serde::de::Error::custom))
                    .collect()
            })
            .collect()
    }
}

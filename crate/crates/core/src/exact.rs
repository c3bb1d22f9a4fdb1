//! Exact scalars.
//!
//! Distances, parameters, tolerances and measure weights are all exact
//! rationals. Gromov products are half-integers in integer metrics, so they
//! are stored doubled.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact rational scalar.
pub type Exact = Ratio<i64>;

pub fn int(n: i64) -> Exact {
    Exact::from_integer(n)
}

/// Parses `p`, `-p`, `p/q`.
pub fn parse_exact(text: &str) -> Result<Exact> {
    let t = text.trim();
    let bad = |msg: &str| Error::parse(0, format!("{msg} in rational {text:?}"));
    match t.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().map_err(|_| bad("bad numerator"))?;
            let q: i64 = q.trim().parse().map_err(|_| bad("bad denominator"))?;
            if q == 0 {
                return Err(bad("zero denominator"));
            }
            Ok(Exact::new(p, q))
        }
        None => t.parse::<i64>().map(int).map_err(|_| bad("bad integer")),
    }
}

/// Canonical text form: `3`, `-1/2`.
pub fn format_exact(x: &Exact) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Six-digit decimal rendering for CSV tables.
pub fn decimal(x: &Exact) -> String {
    format!("{:.6}", *x.numer() as f64 / *x.denom() as f64)
}

pub fn abs(x: Exact) -> Exact {
    x.abs()
}

/// A quantity stored as twice its value, so half-integers stay integral.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct HalfExact {
    doubled: Exact,
}

impl HalfExact {
    pub const ZERO: HalfExact = HalfExact {
        doubled: Ratio::new_raw(0, 1),
    };

    pub fn from_doubled(doubled: Exact) -> Self {
        HalfExact { doubled }
    }

    pub fn from_value(value: Exact) -> Self {
        HalfExact { doubled: value * 2 }
    }

    pub fn doubled(&self) -> Exact {
        self.doubled
    }

    pub fn value(&self) -> Exact {
        self.doubled / 2
    }

    pub fn is_zero(&self) -> bool {
        self.doubled.is_zero()
    }
}

impl PartialOrd for HalfExact {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HalfExact {
    fn cmp(&self, other: &Self) -> Ordering {
        self.doubled.cmp(&other.doubled)
    }
}

impl fmt::Display for HalfExact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_exact(&self.value()))
    }
}

impl fmt::Debug for HalfExact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HalfExact({self})")
    }
}

impl FromStr for HalfExact {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_exact(s).map(HalfExact::from_value)
    }
}

impl Serialize for HalfExact {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for HalfExact {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Serde adapter writing [`Exact`] as its canonical string.
pub mod serde_exact {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Exact, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_exact(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Exact, D::Error> {
        let s = String::deserialize(d)?;
        parse_exact(&s).map_err(serde::de::Error::custom)
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(
            x: &Option<Exact>,
            s: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            match x {
                Some(x) => s.serialize_some(&format_exact(x)),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<Option<Exact>, D::Error> {
            let s = Option::<String>::deserialize(d)?;
            s.map(|s| parse_exact(&s).map_err(serde::de::Error::custom))
                .transpose()
        }
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(
            xs: &[Exact],
            s: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(xs.len()))?;
            for x in xs {
                seq.serialize_element(&format_exact(x))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<Vec<Exact>, D::Error> {
            let v = Vec::<String>::deserialize(d)?;
            v.iter()
                .map(|s| parse_exact(s).map_err(serde::de::Error::custom))
                .collect()
        }
    }
}

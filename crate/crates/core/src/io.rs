//! JSON helpers: integers are written as decimal strings and read from
//! either strings or plain JSON numbers.

use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lattice::LatticeVector;
use crate::linalg::IntMatrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntLike(pub BigInt);

impl From<i64> for IntLike {
    fn from(x: i64) -> Self {
        IntLike(BigInt::from(x))
    }
}

impl From<BigInt> for IntLike {
    fn from(x: BigInt) -> Self {
        IntLike(x)
    }
}

impl From<&BigInt> for IntLike {
    fn from(x: &BigInt) -> Self {
        IntLike(x.clone())
    }
}

impl Serialize for IntLike {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for IntLike {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = IntLike;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer or a decimal string")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<IntLike, E> {
                Ok(IntLike(v.into()))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<IntLike, E> {
                Ok(IntLike(v.into()))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<IntLike, E> {
                v.trim().parse::<BigInt>().map(IntLike).map_err(|_| E::custom(format!("not an integer: {v:?}")))
            }
        }
        d.deserialize_any(V)
    }
}

pub fn parse_int_vector(v: &[IntLike]) -> Result<LatticeVector> {
    v.iter()
        .map(|x| x.0.to_i64().ok_or_else(|| Error::Format(format!("vector entry {} exceeds 64 bits", x.0))))
        .collect::<Result<Vec<i64>>>()
        .map(LatticeVector)
}

pub fn parse_int_matrix(rows: &[Vec<IntLike>]) -> Result<IntMatrix> {
    IntMatrix::from_big_rows(rows.iter().map(|r| r.iter().map(|x| x.0.clone()).collect()).collect())
}

pub fn to_int_like(v: &LatticeVector) -> Vec<IntLike> {
    v.0.iter().map(|&x| x.into()).collect()
}

pub fn matrix_to_int_like(m: &IntMatrix) -> Vec<Vec<IntLike>> {
    m.to_rows().into_iter().map(|r| r.into_iter().map(IntLike).collect()).collect()
}

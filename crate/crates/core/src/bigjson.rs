//! Serde helpers rendering big integers as JSON numbers when they fit in 64
//! bits and as decimal strings otherwise.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::ser::{SerializeSeq, Serializer};

pub fn int<S: Serializer>(n: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    if let Some(v) = n.to_i64() {
        s.serialize_i64(v)
    } else if let Some(v) = n.to_u64() {
        s.serialize_u64(v)
    } else {
        s.serialize_str(&n.to_string())
    }
}

pub fn opt_int<S: Serializer>(n: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
    match n {
        Some(v) => int(v, s),
        None => s.serialize_none(),
    }
}

struct Wrap<'a>(&'a BigInt);

impl serde::Serialize for Wrap<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        int(self.0, s)
    }
}

pub fn ints<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for n in v {
        seq.serialize_element(&Wrap(n))?;
    }
    seq.end()
}

/// JSON value of a big integer under the same convention.
pub fn value(n: &BigInt) -> serde_json::Value {
    int(n, serde_json::value::Serializer).expect("integers always serialize")
}

/// Serializes any `Display` value as a JSON string.
pub fn display<T: std::fmt::Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// Serializes an interval real as its midpoint with 30 decimal places.
pub fn real<S: Serializer>(r: &crate::arith::real::RealApprox, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(&format_args!("{:.30}", r))
}

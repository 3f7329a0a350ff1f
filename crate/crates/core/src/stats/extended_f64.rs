//! Serde for floats that may be infinite: finite values as numbers,
//! infinities as the strings `"inf"` and `"-inf"`.
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Repr {
    Finite(f64),
    Text(String),
}

pub fn serialize<S: Serializer>(t: &f64, s: S) -> Result<S::Ok, S::Error> {
    if t.is_finite() { Repr::Finite(*t) } else { Repr::Text(if *t > 0.0 { "inf" } else { "-inf" }.into()) }.serialize(s)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    match Repr::deserialize(d)? {
        Repr::Finite(t) => Ok(t),
        Repr::Text(s) => s.parse::<f64>().map_err(serde::de::Error::custom),
    }
}

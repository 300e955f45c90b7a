//! JSON documents with duplicate-key detection.

use std::fmt;

use serde::de::{Deserialize, Deserializer, MapAccess, SeqAccess, Visitor};
use thiserror::Error;

use crate::model::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub enum Json {
    Null,
    Bool(bool),
    Integer(i64),
    Real(f64),
    String(String),
    Array(Vec<Json>),
    /// Members in first-occurrence order, keys unique.
    Object(Vec<(String, Json)>),
}

impl Json {
    pub fn get(&self, key: &str) -> Option<&Json> {
        match self {
            Json::Object(m) => m.iter().find(|(k, _)| k == key).map(|(_, v)| v),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Json::String(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_array(&self) -> Option<&[Json]> {
        match self {
            Json::Array(a) => Some(a),
            _ => None,
        }
    }

    pub fn as_object(&self) -> Option<&[(String, Json)]> {
        match self {
            Json::Object(m) => Some(m),
            _ => None,
        }
    }

    /// Leaf values map directly; containers become their compact JSON text.
    pub fn to_scalar(&self) -> Scalar {
        match self {
            Json::Null => Scalar::Null,
            Json::Bool(b) => Scalar::Bool(*b),
            Json::Integer(i) => Scalar::Integer(*i),
            Json::Real(r) => Scalar::Real(*r),
            Json::String(s) => Scalar::Text(s.clone()),
            Json::Array(_) | Json::Object(_) => Scalar::Text(self.to_string()),
        }
    }
}

impl fmt::Display for Json {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let quote = |s: &str| serde_json::to_string(s).unwrap_or_default();
        match self {
            Json::Null => f.write_str("null"),
            Json::Bool(b) => write!(f, "{b}"),
            Json::Integer(i) => write!(f, "{i}"),
            Json::Real(r) => match serde_json::Number::from_f64(*r) {
                Some(n) => write!(f, "{n}"),
                None => f.write_str("null"),
            },
            Json::String(s) => f.write_str(&quote(s)),
            Json::Array(a) => {
                f.write_str("[")?;
                for (i, v) in a.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str("]")
            }
            Json::Object(m) => {
                f.write_str("{")?;
                for (i, (k, v)) in m.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{}:{v}", quote(k))?;
                }
                f.write_str("}")
            }
        }
    }
}

#[derive(Debug, Error, PartialEq)]
#[error("malformed JSON at line {line}, column {column}: {message}")]
pub struct JsonError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JsonDoc {
    pub value: Json,
    pub warnings: Vec<String>,
}

/// Object members as written, duplicates included.
enum Raw {
    Leaf(Json),
    Array(Vec<Raw>),
    Object(Vec<(String, Raw)>),
}

impl<'de> Deserialize<'de> for Raw {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        d.deserialize_any(RawVisitor)
    }
}

struct RawVisitor;

impl<'de> Visitor<'de> for RawVisitor {
    type Value = Raw;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a JSON value")
    }

    fn visit_unit<E>(self) -> Result<Raw, E> {
        Ok(Raw::Leaf(Json::Null))
    }

    fn visit_bool<E>(self, v: bool) -> Result<Raw, E> {
        Ok(Raw::Leaf(Json::Bool(v)))
    }

    fn visit_i64<E>(self, v: i64) -> Result<Raw, E> {
        Ok(Raw::Leaf(Json::Integer(v)))
    }

    fn visit_u64<E>(self, v: u64) -> Result<Raw, E> {
        Ok(Raw::Leaf(match i64::try_from(v) {
            Ok(i) => Json::Integer(i),
            Err(_) => Json::Real(v as f64),
        }))
    }

    fn visit_f64<E>(self, v: f64) -> Result<Raw, E> {
        Ok(Raw::Leaf(Json::Real(v)))
    }

    fn visit_str<E>(self, v: &str) -> Result<Raw, E> {
        Ok(Raw::Leaf(Json::String(v.to_string())))
    }

    fn visit_string<E>(self, v: String) -> Result<Raw, E> {
        Ok(Raw::Leaf(Json::String(v)))
    }

    fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Raw, A::Error> {
        let mut out = Vec::new();
        while let Some(v) = seq.next_element()? {
            out.push(v);
        }
        Ok(Raw::Array(out))
    }

    fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Raw, A::Error> {
        let mut out = Vec::new();
        while let Some((k, v)) = map.next_entry::<String, Raw>()? {
            out.push((k, v));
        }
        Ok(Raw::Object(out))
    }
}

fn resolve(raw: Raw, path: &str, warnings: &mut Vec<String>) -> Json {
    match raw {
        Raw::Leaf(j) => j,
        Raw::Array(items) => Json::Array(
            items
                .into_iter()
                .enumerate()
                .map(|(i, r)| resolve(r, &format!("{path}[{i}]"), warnings))
                .collect(),
        ),
        Raw::Object(members) => {
            let mut out: Vec<(String, Json)> = Vec::with_capacity(members.len());
            for (k, r) in members {
                let v = resolve(r, &format!("{path}.{k}"), warnings);
                match out.iter_mut().find(|(ek, _)| *ek == k) {
                    Some(slot) => {
                        warnings.push(format!("duplicate key `{k}` at {path}; last value kept"));
                        slot.1 = v;
                    }
                    None => out.push((k, v)),
                }
            }
            Json::Object(out)
        }
    }
}

pub fn parse_json(bytes: &[u8]) -> Result<JsonDoc, JsonError> {
    let raw: Raw = serde_json::from_slice(bytes).map_err(|e| JsonError {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let mut warnings = Vec::new();
    let value = resolve(raw, "$", &mut warnings);
    Ok(JsonDoc { value, warnings })
}

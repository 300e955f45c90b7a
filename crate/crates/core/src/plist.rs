//! Apple property lists, binary (`bplist00`) and XML.

use std::collections::BTreeMap;

use base64::Engine;
use thiserror::Error;

use crate::codecs::xml::{parse_xml, Element, XmlError};
use crate::model::APPLE_EPOCH_OFFSET;

#[derive(Debug, Clone, PartialEq)]
pub enum PlistValue {
    Dictionary(BTreeMap<String, PlistValue>),
    Array(Vec<PlistValue>),
    String(String),
    Integer(i64),
    Real(f64),
    Boolean(bool),
    /// Seconds since 2001-01-01T00:00Z.
    Date(f64),
    Data(Vec<u8>),
    Uid(u64),
}

impl PlistValue {
    pub fn get(&self, key: &str) -> Option<&PlistValue> {
        match self {
            PlistValue::Dictionary(d) => d.get(key),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            PlistValue::String(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        match self {
            PlistValue::Integer(i) => Some(*i),
            PlistValue::Real(r) if r.fract() == 0.0 => Some(*r as i64),
            PlistValue::String(s) => s.trim().parse().ok(),
            _ => None,
        }
    }

    /// Every string leaf, depth first, dictionary values in key order.
    pub fn string_leaves(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_strings(&mut out);
        out
    }

    fn collect_strings<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            PlistValue::String(s) => out.push(s),
            PlistValue::Array(a) => a.iter().for_each(|v| v.collect_strings(out)),
            PlistValue::Dictionary(d) => d.values().for_each(|v| v.collect_strings(out)),
            _ => {}
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum PlistError {
    #[error("not a property list (neither bplist00 nor XML)")]
    UnknownFormat,
    #[error("binary plist malformed at byte {offset}: {message}")]
    Binary { offset: usize, message: String },
    #[error("binary plist object {0} references itself")]
    Cycle(u64),
    #[error(transparent)]
    Xml(#[from] XmlError),
    #[error("XML plist invalid: {0}")]
    XmlStructure(String),
}

pub fn parse_plist(bytes: &[u8]) -> Result<PlistValue, PlistError> {
    if bytes.starts_with(b"bplist00") {
        return parse_binary(bytes);
    }
    let body = bytes.strip_prefix(b"\xef\xbb\xbf").unwrap_or(bytes);
    let start = body
        .iter()
        .position(|b| !b.is_ascii_whitespace())
        .unwrap_or(body.len());
    let body = &body[start..];
    if body.starts_with(b"<?xml") || body.starts_with(b"<plist") || body.starts_with(b"<!DOCTYPE") {
        return parse_xml_plist(body);
    }
    Err(PlistError::UnknownFormat)
}

fn bin_err(offset: usize, message: impl Into<String>) -> PlistError {
    PlistError::Binary {
        offset,
        message: message.into(),
    }
}

struct Binary<'a> {
    data: &'a [u8],
    offsets: Vec<usize>,
    ref_size: usize,
}

fn be_uint(b: &[u8]) -> u64 {
    b.iter().fold(0u64, |acc, &x| (acc << 8) | x as u64)
}

fn parse_binary(data: &[u8]) -> Result<PlistValue, PlistError> {
    if data.len() < 8 + 32 {
        return Err(bin_err(data.len(), "file shorter than header plus trailer"));
    }
    let t = data.len() - 32;
    let trailer = &data[t..];
    let off_size = trailer[6] as usize;
    let ref_size = trailer[7] as usize;
    let num_objects = be_uint(&trailer[8..16]);
    let top = be_uint(&trailer[16..24]);
    let table = be_uint(&trailer[24..32]);
    if !(1..=8).contains(&off_size) {
        return Err(bin_err(
            t + 6,
            format!("offset size {off_size} out of range"),
        ));
    }
    if !(1..=8).contains(&ref_size) {
        return Err(bin_err(
            t + 7,
            format!("object reference size {ref_size} out of range"),
        ));
    }
    if top >= num_objects {
        return Err(bin_err(
            t + 16,
            format!("top object {top} not below object count {num_objects}"),
        ));
    }
    let table_end = num_objects
        .checked_mul(off_size as u64)
        .and_then(|n| n.checked_add(table));
    match table_end {
        Some(end) if table >= 8 && end <= t as u64 => {}
        _ => {
            return Err(bin_err(
                t + 24,
                format!("offset table at {table} does not fit before trailer"),
            ))
        }
    }
    let table = table as usize;
    let mut offsets = Vec::with_capacity(num_objects as usize);
    for i in 0..num_objects as usize {
        let at = table + i * off_size;
        let o = be_uint(&data[at..at + off_size]) as usize;
        if o < 8 || o >= table {
            return Err(bin_err(
                at,
                format!("object {i} offset {o} outside object area"),
            ));
        }
        offsets.push(o);
    }
    let bin = Binary {
        data: &data[..table],
        offsets,
        ref_size,
    };
    let mut stack = Vec::new();
    bin.object(top, &mut stack)
}

impl Binary<'_> {
    fn bytes(&self, at: usize, len: usize) -> Result<&[u8], PlistError> {
        at.checked_add(len)
            .and_then(|end| self.data.get(at..end))
            .ok_or_else(|| bin_err(at, format!("{len} bytes run past the object area")))
    }

    /// Length from the marker nibble, or from the following integer object.
    fn length(&self, at: usize, nibble: u8) -> Result<(usize, usize), PlistError> {
        if nibble != 0x0F {
            return Ok((nibble as usize, at + 1));
        }
        let m = *self.bytes(at + 1, 1)?.first().unwrap();
        if m >> 4 != 0x1 || (m & 0x0F) > 3 {
            return Err(bin_err(at + 1, "bad length integer"));
        }
        let w = 1usize << (m & 0x0F);
        let n = be_uint(self.bytes(at + 2, w)?) as usize;
        Ok((n, at + 2 + w))
    }

    fn refs(&self, at: usize, count: usize) -> Result<Vec<u64>, PlistError> {
        let len = count
            .checked_mul(self.ref_size)
            .ok_or_else(|| bin_err(at, "reference list too long"))?;
        let raw = self.bytes(at, len)?;
        Ok(raw.chunks(self.ref_size).map(be_uint).collect())
    }

    fn object(&self, idx: u64, stack: &mut Vec<u64>) -> Result<PlistValue, PlistError> {
        let at = *self
            .offsets
            .get(idx as usize)
            .ok_or_else(|| bin_err(0, format!("reference to missing object {idx}")))?;
        let marker = *self.bytes(at, 1)?.first().unwrap();
        let (hi, lo) = (marker >> 4, marker & 0x0F);
        Ok(match hi {
            0x0 => match marker {
                0x08 => PlistValue::Boolean(false),
                0x09 => PlistValue::Boolean(true),
                _ => return Err(bin_err(at, format!("unsupported marker 0x{marker:02x}"))),
            },
            0x1 => {
                if lo > 3 {
                    return Err(bin_err(
                        at,
                        format!("{}-byte integers are not supported", 1u32 << lo),
                    ));
                }
                let w = 1usize << lo;
                let raw = self.bytes(at + 1, w)?;
                // Widths below eight bytes are unsigned; eight is two's complement.
                PlistValue::Integer(be_uint(raw) as i64)
            }
            0x2 => match lo {
                2 => PlistValue::Real(
                    f32::from_be_bytes(self.bytes(at + 1, 4)?.try_into().unwrap()) as f64,
                ),
                3 => PlistValue::Real(f64::from_be_bytes(
                    self.bytes(at + 1, 8)?.try_into().unwrap(),
                )),
                _ => return Err(bin_err(at, "unsupported real width")),
            },
            0x3 if marker == 0x33 => PlistValue::Date(f64::from_be_bytes(
                self.bytes(at + 1, 8)?.try_into().unwrap(),
            )),
            0x4 => {
                let (n, start) = self.length(at, lo)?;
                PlistValue::Data(self.bytes(start, n)?.to_vec())
            }
            0x5 => {
                let (n, start) = self.length(at, lo)?;
                let raw = self.bytes(start, n)?;
                if !raw.is_ascii() {
                    return Err(bin_err(start, "non-ASCII byte in ASCII string"));
                }
                PlistValue::String(String::from_utf8_lossy(raw).into_owned())
            }
            0x6 => {
                let (n, start) = self.length(at, lo)?;
                let len = n
                    .checked_mul(2)
                    .ok_or_else(|| bin_err(at, "string too long"))?;
                let raw = self.bytes(start, len)?;
                let units: Vec<u16> = raw
                    .chunks(2)
                    .map(|c| u16::from_be_bytes([c[0], c[1]]))
                    .collect();
                PlistValue::String(
                    String::from_utf16(&units)
                        .map_err(|_| bin_err(start, "invalid UTF-16 string"))?,
                )
            }
            0x8 => PlistValue::Uid(be_uint(self.bytes(at + 1, lo as usize + 1)?)),
            0xA | 0xC | 0xD => {
                if stack.contains(&idx) {
                    return Err(PlistError::Cycle(idx));
                }
                stack.push(idx);
                let (n, start) = self.length(at, lo)?;
                let value = if hi == 0xD {
                    let keys = self.refs(start, n)?;
                    let vals = self.refs(start + n * self.ref_size, n)?;
                    let mut d = BTreeMap::new();
                    for (k, v) in keys.into_iter().zip(vals) {
                        let key = match self.object(k, stack)? {
                            PlistValue::String(s) => s,
                            _ => return Err(bin_err(start, "dictionary key is not a string")),
                        };
                        d.insert(key, self.object(v, stack)?);
                    }
                    PlistValue::Dictionary(d)
                } else {
                    let items = self.refs(start, n)?;
                    let mut a = Vec::with_capacity(items.len());
                    for r in items {
                        a.push(self.object(r, stack)?);
                    }
                    PlistValue::Array(a)
                };
                stack.pop();
                value
            }
            _ => return Err(bin_err(at, format!("unsupported marker 0x{marker:02x}"))),
        })
    }
}

fn parse_xml_plist(bytes: &[u8]) -> Result<PlistValue, PlistError> {
    let root = parse_xml(bytes)?;
    let value_el = if root.name == "plist" {
        root.elements()
            .next()
            .ok_or_else(|| PlistError::XmlStructure("empty <plist>".into()))?
    } else {
        &root
    };
    xml_value(value_el)
}

fn xml_value(el: &Element) -> Result<PlistValue, PlistError> {
    let bad = |what: &str| PlistError::XmlStructure(format!("<{}>: {what}", el.name));
    Ok(match el.name.as_str() {
        "dict" => {
            let mut d = BTreeMap::new();
            let mut kids = el.elements();
            while let Some(k) = kids.next() {
                if k.name != "key" {
                    return Err(bad("expected <key>"));
                }
                let v = kids.next().ok_or_else(|| bad("key without value"))?;
                d.insert(k.text(), xml_value(v)?);
            }
            PlistValue::Dictionary(d)
        }
        "array" => PlistValue::Array(el.elements().map(xml_value).collect::<Result<_, _>>()?),
        "string" => PlistValue::String(el.text()),
        "integer" => {
            let t = el.text();
            let t = t.trim();
            let v = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
                Some(hex) => i64::from_str_radix(hex, 16).ok(),
                None => t.parse().ok(),
            };
            PlistValue::Integer(v.ok_or_else(|| bad("integer out of range"))?)
        }
        "real" => {
            let t = el.text();
            let t = t.trim();
            let v = match t.to_ascii_lowercase().as_str() {
                "nan" => f64::NAN,
                "inf" | "+inf" | "infinity" => f64::INFINITY,
                "-inf" | "-infinity" => f64::NEG_INFINITY,
                _ => t.parse().map_err(|_| bad("bad real"))?,
            };
            PlistValue::Real(v)
        }
        "true" => PlistValue::Boolean(true),
        "false" => PlistValue::Boolean(false),
        "date" => PlistValue::Date(parse_iso8601(el.text().trim()).ok_or_else(|| bad("bad date"))?),
        "data" => {
            let cleaned: String = el.text().chars().filter(|c| !c.is_whitespace()).collect();
            PlistValue::Data(
                base64::engine::general_purpose::STANDARD
                    .decode(cleaned)
                    .map_err(|_| bad("bad base64"))?,
            )
        }
        other => {
            return Err(PlistError::XmlStructure(format!(
                "unknown element <{other}>"
            )))
        }
    })
}

/// `YYYY-MM-DDTHH:MM:SSZ` to Apple absolute seconds.
fn parse_iso8601(s: &str) -> Option<f64> {
    let s = s.strip_suffix('Z')?;
    let (date, time) = s.split_once('T')?;
    let d: Vec<i64> = date
        .split('-')
        .map(|p| p.parse().ok())
        .collect::<Option<_>>()?;
    let (secs_str, frac) = match time.split_once('.') {
        Some((a, b)) => (a, format!("0.{b}").parse::<f64>().ok()?),
        None => (time, 0.0),
    };
    let t: Vec<i64> = secs_str
        .split(':')
        .map(|p| p.parse().ok())
        .collect::<Option<_>>()?;
    if d.len() != 3 || t.len() != 3 || !(1..=12).contains(&d[1]) || !(1..=31).contains(&d[2]) {
        return None;
    }
    let days = days_from_civil(d[0], d[1], d[2]);
    let unix = days * 86_400 + t[0] * 3600 + t[1] * 60 + t[2];
    Some(unix as f64 + frac - APPLE_EPOCH_OFFSET)
}

fn days_from_civil(y: i64, m: i64, d: i64) -> i64 {
    let y = if m <= 2 { y - 1 } else { y };
    let era = y.div_euclid(400);
    let yoe = y - era * 400;
    let mp = (m + 9) % 12;
    let doy = (153 * mp + 2) / 5 + d - 1;
    let doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    era * 146_097 + doe - 719_468
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_xml_dict() {
        let v =
            parse_plist(b"<?xml version=\"1.0\"?><plist version=\"1.0\"><dict/></plist>").unwrap();
        assert_eq!(v, PlistValue::Dictionary(BTreeMap::new()));
    }

    #[test]
    fn unknown_format() {
        assert_eq!(
            parse_plist(b"hello").unwrap_err(),
            PlistError::UnknownFormat
        );
        assert_eq!(parse_plist(b"").unwrap_err(), PlistError::UnknownFormat);
    }

    #[test]
    fn reference_binary_size() {
        let mut d = plist::Dictionary::new();
        d.insert("size".into(), plist::Value::Integer(471999.into()));
        let mut buf = Vec::new();
        plist::Value::Dictionary(d)
            .to_writer_binary(&mut buf)
            .unwrap();
        let v = parse_plist(&buf).unwrap();
        assert_eq!(v.get("size"), Some(&PlistValue::Integer(471999)));
    }

    #[test]
    fn iso_dates() {
        assert_eq!(parse_iso8601("2001-01-01T00:00:00Z"), Some(0.0));
        assert_eq!(
            parse_iso8601("1970-01-01T00:00:00Z"),
            Some(-APPLE_EPOCH_OFFSET)
        );
        assert_eq!(
            parse_iso8601("2012-04-20T09:52:49Z"),
            Some(1334915569.0 - APPLE_EPOCH_OFFSET)
        );
        assert_eq!(parse_iso8601("2012-13-20T09:52:49Z"), None);
    }

    /// Hand-assembled: an array whose only element is itself.
    #[test]
    fn cyclic_reference_rejected() {
        let mut b = b"bplist00".to_vec();
        b.push(0xA1);
        b.push(0x00);
        let table = b.len();
        b.push(8);
        let mut trailer = vec![0u8; 6];
        trailer.push(1);
        trailer.push(1);
        trailer.extend_from_slice(&1u64.to_be_bytes());
        trailer.extend_from_slice(&0u64.to_be_bytes());
        trailer.extend_from_slice(&(table as u64).to_be_bytes());
        b.extend_from_slice(&trailer);
        assert_eq!(parse_plist(&b).unwrap_err(), PlistError::Cycle(0));
    }

    #[test]
    fn trailer_inconsistency_reports_offset() {
        let mut buf = Vec::new();
        plist::Value::Array(vec![plist::Value::Boolean(true)])
            .to_writer_binary(&mut buf)
            .unwrap();
        let n = buf.len();
        buf[n - 8..].copy_from_slice(&(n as u64).to_be_bytes());
        match parse_plist(&buf) {
            Err(PlistError::Binary { offset, .. }) => assert_eq!(offset, n - 8),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sixteen_byte_integer_rejected() {
        let mut b = b"bplist00".to_vec();
        b.push(0x14);
        b.extend_from_slice(&[0u8; 16]);
        let table = b.len();
        b.push(8);
        let mut trailer = vec![0u8; 6];
        trailer.extend_from_slice(&[1, 1]);
        trailer.extend_from_slice(&1u64.to_be_bytes());
        trailer.extend_from_slice(&0u64.to_be_bytes());
        trailer.extend_from_slice(&(table as u64).to_be_bytes());
        b.extend_from_slice(&trailer);
        assert!(matches!(parse_plist(&b), Err(PlistError::Binary { .. })));
    }

    #[test]
    fn utf16_and_data_and_uid() {
        let v = plist::Value::Array(vec![
            plist::Value::String("Größe 中".into()),
            plist::Value::Data(vec![0, 1, 2, 255]),
            plist::Value::Uid(plist::Uid::new(7)),
            plist::Value::Integer((-5i64).into()),
        ]);
        let mut buf = Vec::new();
        v.to_writer_binary(&mut buf).unwrap();
        assert_eq!(
            parse_plist(&buf).unwrap(),
            PlistValue::Array(vec![
                PlistValue::String("Größe 中".into()),
                PlistValue::Data(vec![0, 1, 2, 255]),
                PlistValue::Uid(7),
                PlistValue::Integer(-5),
            ])
        );
    }

    #[test]
    fn string_leaves_collects_nested() {
        let xml = br#"<?xml version="1.0" encoding="UTF-8"?>
<plist version="1.0"><dict><key>a</key><array><string>x@y.com</string></array><key>b</key><integer>3</integer></dict></plist>"#;
        assert_eq!(parse_plist(xml).unwrap().string_leaves(), vec!["x@y.com"]);
    }
}

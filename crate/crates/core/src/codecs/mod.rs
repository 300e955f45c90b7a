//! Text formats: XML element trees, JSON documents and logs, Android
//! shared preferences, and line-oriented transaction logs.

pub mod json;
pub mod logs;
pub mod prefs;
pub mod xml;

pub use json::{parse_json, Json, JsonDoc, JsonError};
pub use logs::{parse_json_lines_log, parse_kv_log, LogFormat, ParsedLog};
pub use prefs::{parse_shared_prefs, PrefEntry, PrefKind, PrefsError, SharedPref};
pub use xml::{parse_xml, Element, Node, XmlError};

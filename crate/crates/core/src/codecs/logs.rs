//! Application logs: JSON-lines analytics logs and plain transaction logs.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::json::{parse_json, Json};
use crate::model::{LogEvent, Scalar, TaggedTimestamp};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParsedLog {
    pub events: Vec<LogEvent>,
    pub warnings: Vec<String>,
}

pub fn parse_json_lines_log(text: &str) -> ParsedLog {
    let mut out = ParsedLog::default();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let members = match parse_json(line.as_bytes()) {
            Ok(doc) => match doc.value {
                Json::Object(m) => m,
                _ => {
                    out.warnings
                        .push(format!("line {lineno}: not a JSON object; skipped"));
                    continue;
                }
            },
            Err(e) => {
                out.warnings.push(format!("line {lineno}: {e}; skipped"));
                continue;
            }
        };
        let mut event_kind = None;
        let mut timestamp = None;
        let mut attributes = BTreeMap::new();
        for (k, v) in members {
            match (k.as_str(), &v) {
                ("event", Json::String(s)) if event_kind.is_none() => event_kind = Some(s.clone()),
                ("ts", _) if timestamp.is_none() => match numeric(&v) {
                    Some(t) => timestamp = Some(TaggedTimestamp::unix(t)),
                    None => {
                        attributes.insert(k, v.to_scalar());
                    }
                },
                _ => {
                    attributes.insert(k, v.to_scalar());
                }
            }
        }
        out.events.push(LogEvent {
            timestamp,
            event_kind: event_kind.unwrap_or_else(|| "unknown".to_string()),
            attributes,
        });
    }
    out
}

/// Quoted and bare decimal timestamps are read identically.
fn numeric(v: &Json) -> Option<f64> {
    let f = match v {
        Json::Integer(i) => *i as f64,
        Json::Real(r) => *r,
        Json::String(s) => s.trim().parse().ok()?,
        _ => return None,
    };
    f.is_finite().then_some(f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogFormat {
    DropboxAndroidLog,
    DropboxIosRun,
    SugarsyncLog,
    SyncplicityIosLog,
    SyncplicityAndroidLog,
}

impl LogFormat {
    pub const ALL: [LogFormat; 5] = [
        LogFormat::DropboxAndroidLog,
        LogFormat::DropboxIosRun,
        LogFormat::SugarsyncLog,
        LogFormat::SyncplicityIosLog,
        LogFormat::SyncplicityAndroidLog,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LogFormat::DropboxAndroidLog => "dropbox_android_log",
            LogFormat::DropboxIosRun => "dropbox_ios_run",
            LogFormat::SugarsyncLog => "sugarsync_log",
            LogFormat::SyncplicityIosLog => "syncplicity_ios_log",
            LogFormat::SyncplicityAndroidLog => "syncplicity_android_log",
        }
    }
}

/// Plain transaction log: `<epoch-seconds> <kind> [words] [key=value ...]`.
///
/// All five formats share this grammar. The full text after the timestamp
/// is kept in the `message` attribute; lines without a leading timestamp
/// become `raw` events holding the line.
pub fn parse_kv_log(text: &str, format: LogFormat) -> ParsedLog {
    let mut out = ParsedLog::default();
    for line in text.lines() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut attributes = BTreeMap::new();
        attributes.insert(
            "format".to_string(),
            Scalar::Text(format.as_str().to_string()),
        );
        let (head, rest) = trimmed
            .split_once(char::is_whitespace)
            .unwrap_or((trimmed, ""));
        let ts = head.parse::<f64>().ok().filter(|t| t.is_finite());
        let rest = rest.trim();
        match ts {
            Some(t) if !rest.is_empty() => {
                let mut words = rest.split_whitespace();
                let kind = words.next().unwrap_or_default().to_string();
                for w in words {
                    if let Some((k, v)) = w.split_once('=') {
                        if !k.is_empty() && k != "message" && k != "format" {
                            attributes.insert(k.to_string(), Scalar::Text(v.to_string()));
                        }
                    }
                }
                attributes.insert("message".to_string(), Scalar::Text(rest.to_string()));
                out.events.push(LogEvent {
                    timestamp: Some(TaggedTimestamp::unix(t)),
                    event_kind: kind,
                    attributes,
                });
            }
            _ => {
                attributes.insert("message".to_string(), Scalar::Text(trimmed.to_string()));
                out.events.push(LogEvent {
                    timestamp: None,
                    event_kind: "raw".to_string(),
                    attributes,
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_inputs() {
        assert!(parse_json_lines_log("").events.is_empty());
        assert!(parse_kv_log("", LogFormat::SugarsyncLog).events.is_empty());
    }

    #[test]
    fn missing_ts_and_event() {
        let log = parse_json_lines_log("{\"a\":1}\n\n");
        assert_eq!(log.events.len(), 1);
        assert_eq!(log.events[0].timestamp, None);
        assert_eq!(log.events[0].event_kind, "unknown");
        assert_eq!(log.events[0].attributes["a"], Scalar::Integer(1));
    }

    #[test]
    fn unquoted_ts_same_as_quoted() {
        let a = parse_json_lines_log("{\"ts\":\"1335445641.29\",\"event\":\"x\"}");
        let b = parse_json_lines_log("{\"ts\":1335445641.29,\"event\":\"x\"}");
        assert_eq!(a, b);
        assert_eq!(
            a.events[0].timestamp.unwrap().to_unix_seconds(),
            1335445641.29
        );
    }

    #[test]
    fn malformed_line_warns_with_number() {
        let log = parse_json_lines_log("{\"event\":\"a\"}\n{oops\n{\"event\":\"b\"}\n");
        assert_eq!(log.events.len(), 2);
        assert!(log.warnings[0].starts_with("line 2"));
    }

    #[test]
    fn kv_line() {
        let log = parse_kv_log("1335445000 account created\n", LogFormat::DropboxAndroidLog);
        let e = &log.events[0];
        assert_eq!(e.timestamp, Some(TaggedTimestamp::unix(1335445000.0)));
        assert_eq!(e.event_kind, "account");
        assert_eq!(
            e.attributes["message"],
            Scalar::Text("account created".into())
        );
    }

    #[test]
    fn kv_attributes_and_raw() {
        let log = parse_kv_log(
            "1334914769.5 auth.success user=jdoe@example.com\nnot a timestamped line\n",
            LogFormat::SugarsyncLog,
        );
        assert_eq!(log.events[0].event_kind, "auth.success");
        assert_eq!(
            log.events[0].attributes["user"],
            Scalar::Text("jdoe@example.com".into())
        );
        assert_eq!(log.events[1].event_kind, "raw");
        assert_eq!(
            log.events[1].attributes["message"],
            Scalar::Text("not a timestamped line".into())
        );
    }

    fn arb_line() -> impl Strategy<Value = String> {
        prop_oneof![
            (any::<u32>(), "[a-z.]{1,12}", any::<i32>()).prop_map(|(ts, ev, n)| format!(
                "{{\"ts\":\"{ts}.25\",\"event\":\"{ev}\",\"n\":{n}}}"
            )),
            Just(String::new()),
            Just("{broken".to_string()),
            "[a-z]{1,5}".prop_map(|k| format!("{{\"{k}\":null}}")),
        ]
    }

    proptest! {
        #[test]
        fn concatenation_splits(a in proptest::collection::vec(arb_line(), 0..8), b in proptest::collection::vec(arb_line(), 0..8)) {
            let ta: String = a.iter().map(|l| format!("{l}\n")).collect();
            let tb: String = b.iter().map(|l| format!("{l}\n")).collect();
            let whole = parse_json_lines_log(&format!("{ta}{tb}"));
            let mut parts = parse_json_lines_log(&ta).events;
            parts.extend(parse_json_lines_log(&tb).events);
            prop_assert_eq!(whole.events, parts);
        }
    }
}

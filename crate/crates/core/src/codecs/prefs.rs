//! Android `shared_prefs` XML files.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::xml::{parse_xml, XmlError};
use crate::model::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrefKind {
    String,
    Long,
    Int,
    Boolean,
    Float,
    Set,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrefEntry {
    pub kind: PrefKind,
    pub name: String,
    pub value: Scalar,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SharedPref {
    pub file_name: String,
    pub entries: Vec<PrefEntry>,
    pub warnings: Vec<String>,
}

impl SharedPref {
    pub fn get(&self, name: &str) -> Option<&Scalar> {
        self.entries
            .iter()
            .find(|e| e.name == name)
            .map(|e| &e.value)
    }

    pub fn get_str(&self, name: &str) -> Option<&str> {
        self.get(name).and_then(Scalar::as_str)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum PrefsError {
    #[error(transparent)]
    Xml(#[from] XmlError),
    #[error("shared_prefs root element is <{0}>, expected <map>")]
    NotAMap(String),
}

pub fn parse_shared_prefs(bytes: &[u8], file_name: &str) -> Result<SharedPref, PrefsError> {
    let root = parse_xml(bytes)?;
    if root.name != "map" {
        return Err(PrefsError::NotAMap(root.name));
    }
    let mut entries = Vec::new();
    let mut warnings = Vec::new();
    for el in root.elements() {
        let Some(name) = el.attr("name") else {
            warnings.push(format!("<{}> without name attribute skipped", el.name));
            continue;
        };
        let value_attr = el.attr("value");
        let parsed = match el.name.as_str() {
            "string" => Some((PrefKind::String, Scalar::Text(el.text()))),
            "long" | "int" => {
                let kind = if el.name == "long" {
                    PrefKind::Long
                } else {
                    PrefKind::Int
                };
                let v = value_attr.and_then(|v| v.trim().parse::<i64>().ok());
                let v = match (kind, v) {
                    (PrefKind::Int, Some(i)) if i32::try_from(i).is_err() => None,
                    (_, v) => v,
                };
                v.map(|i| (kind, Scalar::Integer(i)))
            }
            "boolean" => match value_attr.map(str::trim) {
                Some("true") => Some((PrefKind::Boolean, Scalar::Bool(true))),
                Some("false") => Some((PrefKind::Boolean, Scalar::Bool(false))),
                _ => None,
            },
            "float" => value_attr
                .and_then(|v| v.trim().parse::<f64>().ok())
                .map(|f| (PrefKind::Float, Scalar::Real(f))),
            "set" => {
                let items: Vec<String> = el.elements().map(|s| s.text()).collect();
                Some((
                    PrefKind::Set,
                    Scalar::Text(serde_json::to_string(&items).unwrap_or_default()),
                ))
            }
            other => {
                warnings.push(format!("unknown element <{other}> for {name}"));
                continue;
            }
        };
        match parsed {
            Some((kind, value)) => entries.push(PrefEntry {
                kind,
                name: name.to_string(),
                value,
            }),
            None => warnings.push(format!("bad value for <{}> {name}", el.name)),
        }
    }
    Ok(SharedPref {
        file_name: file_name.to_string(),
        entries,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const FILE_CACHE_PREFS: &str = r#"<?xml version="1.0" encoding="utf-8" standalone="yes" ?>
- <map>
  <long name="FILE_CACHE_PREFERENCES_LAST_DECRYPTED_FILE_VERSION_ID" value="145789448" />
  <string name="FILE_CACHE_PREFERENCES_LAST_DECRYPTED_FILE_NAME">016.pdf</string>
</map>
"#;

    #[test]
    fn file_cache_preferences_document() {
        let p =
            parse_shared_prefs(FILE_CACHE_PREFS.as_bytes(), "file_cache_preferences.xml").unwrap();
        assert_eq!(
            p.entries,
            vec![
                PrefEntry {
                    kind: PrefKind::Long,
                    name: "FILE_CACHE_PREFERENCES_LAST_DECRYPTED_FILE_VERSION_ID".into(),
                    value: Scalar::Integer(145789448),
                },
                PrefEntry {
                    kind: PrefKind::String,
                    name: "FILE_CACHE_PREFERENCES_LAST_DECRYPTED_FILE_NAME".into(),
                    value: Scalar::Text("016.pdf".into()),
                },
            ]
        );
    }

    #[test]
    fn empty_map() {
        assert!(parse_shared_prefs(b"<map/>", "x.xml")
            .unwrap()
            .entries
            .is_empty());
    }

    #[test]
    fn auth_token() {
        let doc = br#"<?xml version='1.0' encoding='utf-8' standalone='yes' ?>
<map>
    <string name="authToken">u5es7xli4xejrh89kr6xu14tks6grjn3</string>
    <boolean name="first_run" value="false" />
    <int name="n" value="3" />
</map>"#;
        let p = parse_shared_prefs(doc, "myPreference.xml").unwrap();
        assert_eq!(
            p.get_str("authToken"),
            Some("u5es7xli4xejrh89kr6xu14tks6grjn3")
        );
        assert_eq!(p.entries[0].kind, PrefKind::String);
        assert_eq!(p.get("first_run"), Some(&Scalar::Bool(false)));
    }

    #[test]
    fn long_out_of_range_warns() {
        let p = parse_shared_prefs(
            br#"<map><long name="x" value="99999999999999999999"/></map>"#,
            "x",
        )
        .unwrap();
        assert!(p.entries.is_empty());
        assert_eq!(p.warnings.len(), 1);
    }

    #[test]
    fn wrong_root() {
        assert!(matches!(
            parse_shared_prefs(b"<plist/>", "x"),
            Err(PrefsError::NotAMap(_))
        ));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn escape(s: &str) -> String {
            s.replace('&', "&amp;")
                .replace('<', "&lt;")
                .replace('>', "&gt;")
                .replace('"', "&quot;")
        }

        proptest! {
            #[test]
            fn order_and_names_preserved(
                items in proptest::collection::vec(("[A-Za-z_][A-Za-z0-9_.:-]{0,20}", any::<i64>(), "[a-zA-Z0-9 &<>\"'./_é中-]{0,12}", any::<bool>()), 0..10)
            ) {
                let mut doc = String::from("<?xml version='1.0' encoding='utf-8' standalone='yes' ?>\n<map>\n");
                for (name, n, s, is_long) in &items {
                    if *is_long {
                        doc.push_str(&format!("<long name=\"{}\" value=\"{n}\" />\n", escape(name)));
                    } else {
                        doc.push_str(&format!("<string name=\"{}\">{}</string>\n", escape(name), escape(s)));
                    }
                }
                doc.push_str("</map>\n");
                let p = parse_shared_prefs(doc.as_bytes(), "p.xml").unwrap();
                prop_assert_eq!(p.entries.len(), items.len());
                for (e, (name, n, s, is_long)) in p.entries.iter().zip(&items) {
                    prop_assert_eq!(&e.name, name);
                    if *is_long {
                        prop_assert_eq!(&e.value, &Scalar::Integer(*n));
                    } else {
                        prop_assert_eq!(&e.value, &Scalar::Text(s.clone()));
                    }
                }
            }
        }
    }
}

//! The JSON report and its text projection.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use cloudsift::merge::{count_recovered, MergedDataset};
use cloudsift::model::{AppSnapshot, ContentLocation, ObjectOrigin, RecoveredObject, Rendition};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: &str = "1";
pub const NO_PROVIDERS: &str = "no providers detected";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

impl Default for ToolInfo {
    fn default() -> Self {
        ToolInfo {
            name: "cloudsift".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputRole {
    Internal,
    Sd,
    Raw,
    Registry,
    Known,
    Report,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputKind {
    Tree,
    Image,
    File,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct InputRecord {
    pub role: InputRole,
    pub kind: InputKind,
    pub sha1: String,
}

/// Run-specific data, excluded from determinism comparisons.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RunInfo {
    pub started_at: String,
    pub command: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub paths: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: String,
    pub tool: ToolInfo,
    pub inputs: Vec<InputRecord>,
    pub snapshots: Vec<AppSnapshot>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub merged: Vec<MergedDataset>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub unlinked_carved: Vec<RecoveredObject>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub run: Option<RunInfo>,
}

impl Default for Report {
    fn default() -> Self {
        Report {
            schema_version: SCHEMA_VERSION.to_string(),
            tool: ToolInfo::default(),
            inputs: Vec::new(),
            snapshots: Vec::new(),
            merged: Vec::new(),
            unlinked_carved: Vec::new(),
            warnings: Vec::new(),
            notes: Vec::new(),
            run: None,
        }
    }
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Report, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// JSON without the run sidecar.
    pub fn deterministic_json(&self) -> String {
        Report {
            run: None,
            ..self.clone()
        }
        .to_json()
    }

    /// Snapshot warnings and evidence problems; the empty-evidence warning
    /// alone does not make a run partial.
    pub fn is_partial(&self) -> bool {
        self.snapshots.iter().any(|s| !s.warnings.is_empty())
            || self.warnings.iter().any(|w| w != NO_PROVIDERS)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let w = &mut out;
        let _ = writeln!(
            w,
            "{} {} (report schema {})",
            self.tool.name, self.tool.version, self.schema_version
        );
        for i in &self.inputs {
            let _ = writeln!(w, "input {:?}/{:?} sha1 {}", i.role, i.kind, i.sha1);
        }
        for s in &self.snapshots {
            let _ = writeln!(w, "\n== {}", s.identity);
            let a = &s.account;
            for (k, v) in [
                ("email", &a.email),
                ("display name", &a.display_name),
                ("user id", &a.user_id),
                ("auth token", &a.auth_token),
                ("password hash", &a.password_hash),
            ] {
                if let Some(v) = v {
                    let _ = writeln!(w, "  {k}: {v}");
                }
            }
            for e in &s.entries {
                let mut line = format!(
                    "  [{}] {:<24} {}",
                    e.status.table_mark().symbol(),
                    e.entry.name,
                    e.status.as_str()
                );
                if let Some(size) = e.entry.size_bytes {
                    let _ = write!(line, " size={size}");
                }
                if let Some(h) = &e.entry.hash {
                    let _ = write!(line, " {h}");
                }
                let _ = writeln!(w, "{line}");
                for o in &e.objects {
                    let _ = writeln!(w, "      {}", object_line(o));
                }
                if let Some(u) = &e.download_url {
                    let _ = writeln!(w, "      url {u}");
                }
            }
            for a in &s.artifacts {
                let _ = writeln!(w, "  artifact {:?} {}:{}", a.role, a.tree, a.path);
            }
            if !s.events.is_empty() {
                let _ = writeln!(w, "  {} log events", s.events.len());
            }
            for n in &s.notes {
                let _ = writeln!(w, "  note: {n}");
            }
            for x in &s.warnings {
                let _ = writeln!(w, "  warning: {x}");
            }
        }
        for m in &self.merged {
            let p = m
                .provider
                .map_or_else(|| "-".to_string(), |p| p.to_string());
            let _ = writeln!(w, "\n== merged {p}: {} recovered", count_recovered(m));
            for it in &m.items {
                let devs: Vec<String> = it
                    .provenance
                    .iter()
                    .map(|(d, s)| format!("{d}={}", s.as_str()))
                    .collect();
                let _ = writeln!(
                    w,
                    "  [{}] {:<24} {} ({})",
                    it.best_status.table_mark().symbol(),
                    it.key.name,
                    it.best_status.as_str(),
                    devs.join(", ")
                );
                for c in &it.conflicts {
                    let _ = writeln!(w, "      conflict: {c}");
                }
            }
        }
        if !self.unlinked_carved.is_empty() {
            let _ = writeln!(w, "\nunlinked carved objects:");
            for o in &self.unlinked_carved {
                let _ = writeln!(w, "  {}", object_line(o));
            }
        }
        for n in &self.notes {
            let _ = writeln!(w, "note: {n}");
        }
        for x in &self.warnings {
            let _ = writeln!(w, "warning: {x}");
        }
        out
    }
}

fn object_line(o: &RecoveredObject) -> String {
    let loc = match &o.content {
        ContentLocation::TreePath { tree, path } => format!("{tree}:{path}"),
        ContentLocation::ImageExtent {
            image,
            offset,
            length,
        } => format!("{image}@{offset}+{length}"),
    };
    let origin = match o.origin {
        ObjectOrigin::CarvedAtOffset(_) => "carved",
        ObjectOrigin::CachePath => "cache",
        ObjectOrigin::OfflineDir => "offline",
        ObjectOrigin::ThumbnailDir => "thumbnail",
        ObjectOrigin::PreviewDir => "preview",
    };
    let rendition = match o.rendition {
        Rendition::Original => "original",
        Rendition::Thumbnail => "thumbnail",
        Rendition::Preview => "preview",
    };
    format!(
        "{origin} {rendition} {loc} {} bytes sha1 {}",
        o.length, o.sha1
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::{analyze_evidence, Evidence};
    use cloudsift::locator::builtin_registry;
    use cloudsift::model::{AppIdentity, DeviceState, Platform, Provider};
    use cloudsift_corpus::{dataset_spec, generate, known_set, Scenario};

    fn box_report() -> Report {
        let data = dataset_spec(11);
        let s = Scenario {
            identity: AppIdentity::new(Provider::Box, Platform::Android, "1.6.7"),
            state: DeviceState::CacheCleared,
            seed: 11,
        };
        let g = generate(&s, &data).unwrap();
        let known = known_set(&data);
        let ev = Evidence {
            internal: g.internal,
            sd: g.sd,
            raw: g.raw,
        };
        analyze_evidence(&ev, &builtin_registry(), Some(&known))
    }

    #[test]
    fn json_round_trip() {
        let mut r = box_report();
        r.run = Some(RunInfo {
            started_at: "2026-01-01T00:00:00Z".into(),
            command: "analyze".into(),
            paths: [("internal".to_string(), "/evidence/internal".to_string())].into(),
        });
        let back = Report::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_json(), r.to_json());
    }

    #[test]
    fn run_sidecar_excluded_from_deterministic_form() {
        let a = box_report();
        let mut b = a.clone();
        b.run = Some(RunInfo::default());
        assert_ne!(a.to_json(), b.to_json());
        assert_eq!(a.deterministic_json(), b.deterministic_json());
    }

    #[test]
    fn enums_serialize_snake_case() {
        let json = box_report().to_json();
        assert!(json.contains("\"carved_deleted\""));
        assert!(json.contains("\"metadata_store\""));
        assert!(json.contains("\"schema_version\": \"1\""));
    }

    #[test]
    fn text_lists_every_entry_and_url() {
        let r = box_report();
        let text = r.to_text();
        for e in &r.snapshots[0].entries {
            assert!(text.contains(&e.entry.name), "{}", e.entry.name);
            if let Some(u) = &e.download_url {
                assert!(text.contains(u.as_str()));
            }
        }
    }

    #[test]
    fn partial_only_on_real_warnings() {
        let mut r = Report::default();
        r.warnings.push(NO_PROVIDERS.to_string());
        assert!(!r.is_partial());
        r.warnings.push("internal: unreadable".to_string());
        assert!(r.is_partial());
    }
}

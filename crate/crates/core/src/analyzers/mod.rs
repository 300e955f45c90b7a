//! Turns located artifacts into an [`AppSnapshot`].

pub mod account;
pub mod fieldmap;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codecs::{
    parse_json, parse_json_lines_log, parse_kv_log, parse_shared_prefs, Json, LogFormat,
};
use crate::evidence::{file_name_of, EvidenceTree};
use crate::locator::{ArtifactHit, ArtifactRole, DetectedApp};
use crate::model::{
    classify_status, AccountInfo, AppSnapshot, ArtifactRecord, CloudFileEntry, ContentLocation,
    HashAlgorithm, LogEvent, ObjectOrigin, Platform, Provider, RecoveredObject, RecoveryStatus,
    Rendition, Scalar, SnapshotEntry,
};
use crate::plist::{parse_plist, PlistValue};
use crate::sqlite::Database;

use account::{account_from_pairs, is_email, parse_kv_text};
use fieldmap::{apply_map, find_map, maps_for, FieldMap};

pub const BOX_DOWNLOAD_PREFIX: &str = "https://www.box.net/api/1.0/download/";
pub const BOX_ALTERNATE_HOST: &str = "mobile-api.box.com";
pub const THUMBNAIL_PREFIX: &str = "thumb_";

#[derive(Debug, Error, PartialEq)]
pub enum AnalyzerError {
    #[error("{0} must not be empty")]
    EmptyArgument(&'static str),
    #[error("entry `{0}` carries no hash")]
    NoHash(String),
}

/// Direct download link for a Box file.
pub fn reconstruct_box_url(auth_token: &str, file_id: &str) -> Result<String, AnalyzerError> {
    if auth_token.is_empty() {
        return Err(AnalyzerError::EmptyArgument("auth token"));
    }
    if file_id.is_empty() {
        return Err(AnalyzerError::EmptyArgument("file id"));
    }
    Ok(format!("{BOX_DOWNLOAD_PREFIX}{auth_token}/{file_id}"))
}

pub fn verify_entry_hash(
    entry: &CloudFileEntry,
    object: &RecoveredObject,
) -> Result<bool, AnalyzerError> {
    let hash = entry
        .hash
        .as_ref()
        .ok_or_else(|| AnalyzerError::NoHash(entry.name.clone()))?;
    Ok(object.matches_hash(hash))
}

/// Reference hashes of known files and their renditions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnownFile {
    pub name: String,
    pub rendition: Rendition,
    pub size: u64,
    pub md5: String,
    pub sha1: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct KnownSet {
    pub files: Vec<KnownFile>,
}

impl KnownSet {
    pub fn lookup(&self, obj: &RecoveredObject) -> Option<&KnownFile> {
        self.files
            .iter()
            .find(|k| k.size == obj.length && k.sha1 == obj.sha1 && k.md5 == obj.md5)
    }

    pub fn original_names(&self) -> impl Iterator<Item = &str> {
        self.files
            .iter()
            .filter(|k| k.rendition == Rendition::Original)
            .map(|k| k.name.as_str())
    }
}

pub struct AnalysisContext<'a> {
    pub trees: &'a [&'a EvidenceTree],
    pub carved: &'a [RecoveredObject],
    pub known: Option<&'a KnownSet>,
}

#[derive(Default)]
struct Slot {
    entry: CloudFileEntry,
    objects: Vec<RecoveredObject>,
    sources: Vec<String>,
}

#[derive(Default)]
struct Builder {
    slots: BTreeMap<String, Slot>,
    account: AccountInfo,
    events: Vec<LogEvent>,
    warnings: Vec<String>,
    notes: Vec<String>,
    offline_ids: BTreeSet<String>,
    offline_names: BTreeSet<String>,
    encrypted_ids: BTreeSet<String>,
    encrypted_names: BTreeSet<String>,
    id_extras: Vec<(String, String, Scalar)>,
}

impl Builder {
    fn add_entry(&mut self, e: CloudFileEntry) {
        let source = e.source_artifact.clone();
        match self.slots.get_mut(&e.name) {
            Some(slot) => {
                for c in slot.entry.merge_from(&e) {
                    self.warnings.push(format!("{}: conflicting {c}", e.name));
                }
                if let Some(s) = source {
                    if !slot.sources.contains(&s) {
                        slot.sources.push(s);
                    }
                }
            }
            None => {
                self.slots.insert(
                    e.name.clone(),
                    Slot {
                        sources: source.into_iter().collect(),
                        entry: e,
                        objects: Vec::new(),
                    },
                );
            }
        }
    }

    fn slot(&mut self, name: &str) -> &mut Slot {
        self.slots.entry(name.to_string()).or_insert_with(|| Slot {
            entry: CloudFileEntry::named(name),
            ..Default::default()
        })
    }

    fn name_by_id(&self, id: &str) -> Option<String> {
        self.slots
            .values()
            .find(|s| s.entry.remote_id.as_deref() == Some(id))
            .map(|s| s.entry.name.clone())
    }

    fn name_by_hash(&self, obj: &RecoveredObject) -> Option<String> {
        self.slots
            .values()
            .find(|s| s.entry.hash.as_ref().is_some_and(|h| obj.matches_hash(h)))
            .map(|s| s.entry.name.clone())
    }

    fn absorb_account(&mut self, a: AccountInfo) {
        self.account.absorb(a);
    }
}

fn tree_for<'a>(ctx: &AnalysisContext<'a>, label: &str) -> Option<&'a EvidenceTree> {
    ctx.trees.iter().copied().find(|t| t.label() == label)
}

fn source_label(hit: &ArtifactHit) -> String {
    format!("{}:{}", hit.tree, hit.resolved_path)
}

/// Builds the snapshot for one detected application.
pub fn analyze(app: &DetectedApp, ctx: &AnalysisContext) -> AppSnapshot {
    let id = &app.identity;
    let maps = maps_for(id.provider, id.platform, id.version.as_str());
    let mut b = Builder::default();
    if !app.candidate_versions.is_empty() {
        b.notes.push(format!(
            "version not determined from evidence; candidates: {}",
            app.candidate_versions.join(", ")
        ));
    }
    let mut hits: Vec<&ArtifactHit> = app.hits.iter().collect();
    hits.sort_by(|a, b| (&a.tree, &a.resolved_path).cmp(&(&b.tree, &b.resolved_path)));

    for h in &hits {
        if h.ambiguous {
            b.warnings.push(format!(
                "{}: application folder matches more than one provider",
                h.resolved_path
            ));
        }
        if let Some(email) = h.bindings.get("EMAIL") {
            b.absorb_account(AccountInfo {
                email: Some(email.clone()),
                ..Default::default()
            });
        }
        if let Some(uid) = h.bindings.get("USERID") {
            b.absorb_account(AccountInfo {
                user_id: Some(uid.clone()),
                ..Default::default()
            });
        }
    }

    // Stores first so that content can be linked against their entries.
    for h in &hits {
        let role = h.signature.role;
        if role.is_dir() {
            continue;
        }
        let Some(tree) = tree_for(ctx, &h.tree) else {
            continue;
        };
        let bytes = match tree.read(&h.resolved_path) {
            Ok(b) => b,
            Err(e) => {
                b.warnings.push(format!("{}: {e}", h.resolved_path));
                continue;
            }
        };
        match role {
            ArtifactRole::LogFile => read_log(&mut b, h, &bytes, id.provider, id.platform),
            _ => read_store(&mut b, h, &bytes, &maps),
        }
    }
    if !hits
        .iter()
        .any(|h| h.signature.role == ArtifactRole::MetadataStore)
    {
        b.warnings.push("no file metadata store found".to_string());
    }

    // Offline lists and id-keyed extras.
    for id in b.offline_ids.clone() {
        if let Some(name) = b.name_by_id(&id) {
            b.offline_names.insert(name);
        }
    }
    for name in b.offline_names.clone() {
        if let Some(slot) = b.slots.get_mut(&name) {
            slot.entry.favorite.get_or_insert(true);
        }
    }
    for (id, key, value) in std::mem::take(&mut b.id_extras) {
        if let Some(name) = b.name_by_id(&id) {
            b.slot(&name).entry.extras.insert(key, value);
        }
    }

    collect_dir_objects(&mut b, &hits, ctx);
    link_carved(&mut b, ctx);

    let encrypted_present = hits.iter().any(|h| {
        h.signature.role == ArtifactRole::EncryptedCacheDir
            && tree_for(ctx, &h.tree).is_some_and(|t| !t.files_under(&h.resolved_path).is_empty())
    });
    let mut encrypted: BTreeSet<String> = BTreeSet::new();
    if encrypted_present {
        encrypted.extend(b.encrypted_names.iter().cloned());
        for id in b.encrypted_ids.clone() {
            if let Some(n) = b.name_by_id(&id) {
                encrypted.insert(n);
            }
        }
    }

    if let Some(known) = ctx.known {
        for name in known.original_names() {
            if !b.slots.contains_key(name) {
                b.slot(name);
            }
        }
    }

    if !ctx.carved.is_empty() {
        b.notes.push(
            "carved objects are linked by metadata hash, then reference hash, then unique size; fragmented files are not reassembled"
                .to_string(),
        );
    }
    let box_token = (id.provider == Provider::Box)
        .then(|| b.account.auth_token.clone())
        .flatten();
    if box_token.is_some() {
        b.notes.push(format!(
            "download links use the www.box.net template; the same path is also served from {BOX_ALTERNATE_HOST}"
        ));
    }

    let mut warnings = std::mem::take(&mut b.warnings);
    let entries = std::mem::take(&mut b.slots)
        .into_values()
        .map(|slot| {
            let mut status = classify_status(&slot.entry, &slot.objects, &mut warnings);
            if slot.objects.is_empty() && encrypted.contains(&slot.entry.name) {
                status = status.max(RecoveryStatus::EncryptedCacheOnly);
            }
            let download_url = match (&box_token, &slot.entry.remote_id) {
                (Some(t), Some(rid)) => reconstruct_box_url(t, rid).ok(),
                _ => None,
            };
            SnapshotEntry {
                entry: slot.entry,
                status,
                objects: slot.objects,
                sources: slot.sources,
                download_url,
            }
        })
        .collect();

    let artifacts = hits
        .iter()
        .map(|h| ArtifactRecord {
            role: h.signature.role,
            tree: h.tree.clone(),
            path: h.resolved_path.clone(),
            provenance: h.signature.provenance.clone(),
            ambiguous: h.ambiguous,
        })
        .collect();

    AppSnapshot {
        identity: app.identity.clone(),
        account: b.account,
        entries,
        events: b.events,
        artifacts,
        warnings,
        notes: b.notes,
    }
}

fn read_log(
    b: &mut Builder,
    h: &ArtifactHit,
    bytes: &[u8],
    provider: Provider,
    platform: Platform,
) {
    if bytes.starts_with(&[0x1F, 0x8B]) {
        b.warnings
            .push(format!("{}: compressed log not decoded", h.resolved_path));
        return;
    }
    let text = String::from_utf8_lossy(bytes);
    let name = file_name_of(&h.resolved_path).to_ascii_lowercase();
    let parsed = if name == "analytics.log" {
        parse_json_lines_log(&text)
    } else {
        let format = match (provider, platform) {
            (Provider::Dropbox, Platform::Android) => LogFormat::DropboxAndroidLog,
            (Provider::Dropbox, Platform::Ios) => LogFormat::DropboxIosRun,
            (Provider::SugarSync, _) => LogFormat::SugarsyncLog,
            (Provider::Syncplicity, Platform::Ios) => LogFormat::SyncplicityIosLog,
            _ => LogFormat::SyncplicityAndroidLog,
        };
        parse_kv_log(&text, format)
    };
    for w in parsed.warnings {
        b.warnings.push(format!("{}: {w}", h.resolved_path));
    }
    b.events.extend(parsed.events);
}

fn read_store(b: &mut Builder, h: &ArtifactHit, bytes: &[u8], maps: &[&FieldMap]) {
    let file = file_name_of(&h.resolved_path);
    let lower = file.to_ascii_lowercase();
    let source = source_label(h);
    if bytes.starts_with(b"SQLite format 3\0") {
        read_sqlite(b, &source, file, bytes, maps);
    } else if lower.ends_with(".plist") {
        match parse_plist(bytes) {
            Ok(v) => read_plist(b, &source, file, &v, maps),
            Err(e) => b.warnings.push(format!("{source}: {e}")),
        }
    } else if lower.ends_with(".xml") {
        match parse_shared_prefs(bytes, file) {
            Ok(p) => {
                for w in &p.warnings {
                    b.warnings.push(format!("{source}: {w}"));
                }
                read_prefs(b, &lower, &p);
            }
            Err(e) => b.warnings.push(format!("{source}: {e}")),
        }
    } else if let Some(map) = find_map(maps, file, "") {
        match parse_json(bytes) {
            Ok(doc) => {
                for w in &doc.warnings {
                    b.warnings.push(format!("{source}: {w}"));
                }
                let mut records = Vec::new();
                json_records(&doc.value, map, &mut records);
                for rec in records {
                    let fields = rec.iter().map(|(k, v)| (k.as_str(), v.to_scalar()));
                    if let Some(e) = apply_map(map, fields, &source, &mut b.warnings) {
                        b.add_entry(e);
                    }
                }
            }
            Err(e) => b.warnings.push(format!("{source}: {e}")),
        }
    } else {
        let text = String::from_utf8_lossy(bytes);
        let kv = parse_kv_text(&text);
        b.absorb_account(account_from_pairs(
            kv.iter().map(|(k, v)| (k.as_str(), v.as_str())),
        ));
    }
}

/// Objects anywhere in the document that carry the map's name column.
fn json_records<'a>(v: &'a Json, map: &FieldMap, out: &mut Vec<&'a [(String, Json)]>) {
    let name_col = map
        .columns
        .iter()
        .find(|c| {
            matches!(
                c.target,
                fieldmap::Target::Name | fieldmap::Target::NameFromPath
            )
        })
        .map(|c| c.column);
    match v {
        Json::Object(members) => {
            if name_col.is_some_and(|n| members.iter().any(|(k, _)| k == n)) {
                out.push(members);
            } else {
                members.iter().for_each(|(_, m)| json_records(m, map, out));
            }
        }
        Json::Array(items) => items.iter().for_each(|i| json_records(i, map, out)),
        _ => {}
    }
}

const SQLITE_SKIP: [&str; 4] = [
    "sqlite_sequence",
    "sqlite_stat1",
    "z_primarykey",
    "z_metadata",
];

fn read_sqlite(b: &mut Builder, source: &str, file: &str, bytes: &[u8], maps: &[&FieldMap]) {
    let db = match Database::open(bytes) {
        Ok(db) => db,
        Err(e) => {
            b.warnings.push(format!("{source}: {e}"));
            return;
        }
    };
    for w in db.schema_warnings() {
        b.warnings.push(format!("{source}: {w}"));
    }
    let tables: Vec<String> = db.tables().map(|t| t.name.clone()).collect();
    for table in tables {
        if SQLITE_SKIP.contains(&table.to_ascii_lowercase().as_str()) {
            continue;
        }
        let rows = match db.read_rows(&table) {
            Ok(r) => r,
            Err(e) => {
                b.warnings.push(format!("{source}#{table}: {e}"));
                continue;
            }
        };
        for w in &rows.warnings {
            b.warnings.push(format!("{source}#{table}: {w}"));
        }
        if let Some(map) = find_map(maps, file, &table) {
            if let Some((prefix, _)) = map.table.split_once("{X}") {
                let uid = &table[prefix.len().min(table.len())..];
                b.absorb_account(AccountInfo {
                    user_id: (!uid.is_empty()).then(|| uid.to_string()),
                    ..Default::default()
                });
            }
            let table_source = format!("{source}#{table}");
            for row in &rows.rows {
                let fields = rows
                    .columns
                    .iter()
                    .zip(&row.values)
                    .map(|(c, v)| (c.as_str(), v.to_scalar()));
                match apply_map(map, fields, &table_source, &mut b.warnings) {
                    Some(e) => b.add_entry(e),
                    None => b.warnings.push(format!(
                        "{table_source}: row {} has no file name",
                        row.rowid
                    )),
                }
            }
        } else if table.eq_ignore_ascii_case("Files_and_Folders_to_Synchronize") {
            for row in &rows.rows {
                for v in &row.values {
                    if let Some(s) = v.to_scalar().as_str() {
                        b.offline_names.insert(file_name_of(s).to_string());
                    }
                }
            }
        } else {
            let key_col = rows.columns.iter().position(|c| {
                let c = c.to_ascii_lowercase();
                c.contains("key") || c.ends_with("name")
            });
            let value_col = rows
                .columns
                .iter()
                .position(|c| c.to_ascii_lowercase().contains("value"));
            for row in &rows.rows {
                let texts: Vec<(String, String)> = rows
                    .columns
                    .iter()
                    .zip(&row.values)
                    .filter_map(|(c, v)| v.to_scalar().as_str().map(|s| (c.clone(), s.to_string())))
                    .collect();
                let mut pairs: Vec<(&str, &str)> = texts
                    .iter()
                    .map(|(c, v)| (c.as_str(), v.as_str()))
                    .collect();
                let kv = match (key_col, value_col) {
                    (Some(k), Some(v)) => {
                        let k = row
                            .values
                            .get(k)
                            .and_then(|x| x.to_scalar().as_str().map(str::to_string));
                        let v = row
                            .values
                            .get(v)
                            .and_then(|x| x.to_scalar().as_str().map(str::to_string));
                        k.zip(v)
                    }
                    _ => None,
                };
                if let Some((k, v)) = &kv {
                    pairs.insert(0, (k.as_str(), v.as_str()));
                }
                b.absorb_account(account_from_pairs(pairs));
            }
        }
    }
}

fn plist_scalar(v: &PlistValue) -> Scalar {
    match v {
        PlistValue::String(s) => Scalar::Text(s.clone()),
        PlistValue::Integer(i) => Scalar::Integer(*i),
        PlistValue::Real(r) | PlistValue::Date(r) => Scalar::Real(*r),
        PlistValue::Boolean(b) => Scalar::Bool(*b),
        PlistValue::Data(d) => Scalar::bytes(d),
        PlistValue::Uid(u) => Scalar::Integer(*u as i64),
        PlistValue::Dictionary(_) | PlistValue::Array(_) => Scalar::Null,
    }
}

fn plist_pairs<'a>(key: &'a str, v: &'a PlistValue, out: &mut Vec<(&'a str, &'a str)>) {
    match v {
        PlistValue::String(s) => out.push((key, s)),
        PlistValue::Array(a) => a.iter().for_each(|x| plist_pairs(key, x, out)),
        PlistValue::Dictionary(d) => d.iter().for_each(|(k, x)| plist_pairs(k, x, out)),
        _ => {}
    }
}

fn read_plist(b: &mut Builder, source: &str, file: &str, v: &PlistValue, maps: &[&FieldMap]) {
    if let Some(map) = find_map(maps, file, "") {
        let mut records = Vec::new();
        plist_records(v, map, &mut records);
        for rec in records {
            let fields = rec.iter().map(|(k, x)| (k.as_str(), plist_scalar(x)));
            if let Some(e) = apply_map(map, fields, source, &mut b.warnings) {
                b.add_entry(e);
            }
        }
        return;
    }
    let mut pairs = Vec::new();
    plist_pairs("", v, &mut pairs);
    b.absorb_account(account_from_pairs(pairs));
}

fn plist_records<'a>(
    v: &'a PlistValue,
    map: &FieldMap,
    out: &mut Vec<&'a BTreeMap<String, PlistValue>>,
) {
    match v {
        PlistValue::Dictionary(d) => {
            if map.columns.iter().any(|c| {
                matches!(
                    c.target,
                    fieldmap::Target::Name | fieldmap::Target::NameFromPath
                ) && d.contains_key(c.column)
            }) {
                out.push(d);
            } else {
                d.values().for_each(|x| plist_records(x, map, out));
            }
        }
        PlistValue::Array(a) => a.iter().for_each(|x| plist_records(x, map, out)),
        _ => {}
    }
}

fn read_prefs(b: &mut Builder, lower_name: &str, p: &crate::codecs::SharedPref) {
    let rendered: Vec<(String, String)> = p
        .entries
        .iter()
        .filter_map(|e| e.value.as_str().map(|v| (e.name.clone(), v.to_string())))
        .collect();
    b.absorb_account(account_from_pairs(
        rendered.iter().map(|(k, v)| (k.as_str(), v.as_str())),
    ));
    if lower_name == "downloaded_files.xml" || lower_name == "offlinefilesharedpreferences.xml" {
        for e in &p.entries {
            b.offline_ids.insert(e.name.clone());
            if lower_name.starts_with("offline") {
                b.encrypted_ids.insert(e.name.clone());
            }
        }
    } else if lower_name == "preview_num_pages.xml" {
        for e in &p.entries {
            b.id_extras
                .push((e.name.clone(), "preview_pages".to_string(), e.value.clone()));
        }
    } else if lower_name.starts_with("file_cache_preferences") {
        for (_, v) in &rendered {
            if !is_email(v) {
                b.encrypted_names.insert(v.clone());
            }
        }
    }
}

fn dir_origin(role: ArtifactRole) -> (ObjectOrigin, Rendition) {
    match role {
        ArtifactRole::ThumbnailDir => (ObjectOrigin::ThumbnailDir, Rendition::Thumbnail),
        ArtifactRole::PreviewDir => (ObjectOrigin::PreviewDir, Rendition::Preview),
        ArtifactRole::OfflineDir => (ObjectOrigin::OfflineDir, Rendition::Original),
        _ => (ObjectOrigin::CachePath, Rendition::Original),
    }
}

fn collect_dir_objects(b: &mut Builder, hits: &[&ArtifactHit], ctx: &AnalysisContext) {
    let file_hits: BTreeSet<(&str, &str)> = hits
        .iter()
        .filter(|h| !h.signature.role.is_dir())
        .map(|h| (h.tree.as_str(), h.resolved_path.as_str()))
        .collect();
    let dir_hits: Vec<&&ArtifactHit> = hits
        .iter()
        .filter(|h| {
            h.signature.role.is_dir() && h.signature.role != ArtifactRole::EncryptedCacheDir
        })
        .collect();
    let mut seen: BTreeSet<(String, String)> = BTreeSet::new();
    for h in &dir_hits {
        let Some(tree) = tree_for(ctx, &h.tree) else {
            continue;
        };
        for path in tree.files_under(&h.resolved_path) {
            if file_hits.contains(&(h.tree.as_str(), path))
                || !seen.insert((h.tree.clone(), path.to_string()))
            {
                continue;
            }
            // Deepest containing hit owns the file.
            let owner = dir_hits
                .iter()
                .filter(|d| d.tree == h.tree && path.starts_with(&format!("{}/", d.resolved_path)))
                .max_by_key(|d| d.resolved_path.len())
                .unwrap_or(h);
            let (origin, mut rendition) = dir_origin(owner.signature.role);
            let bytes = match tree.read(path) {
                Ok(x) => x,
                Err(e) => {
                    b.warnings.push(format!("{path}: {e}"));
                    continue;
                }
            };
            let file = file_name_of(path);
            let mut key = file.to_string();
            if let Some(stripped) = file.strip_prefix(THUMBNAIL_PREFIX) {
                if rendition == Rendition::Original {
                    rendition = Rendition::Thumbnail;
                }
                key = stripped.to_string();
            }
            let Ok(mut obj) = RecoveredObject::from_bytes(
                file,
                origin,
                rendition,
                ContentLocation::TreePath {
                    tree: h.tree.clone(),
                    path: path.to_string(),
                },
                &bytes,
            ) else {
                continue;
            };
            let name = if b.slots.contains_key(&key) {
                key
            } else if let Some(n) = b.name_by_id(stem(&key)) {
                n
            } else if let Some(n) = b.name_by_hash(&obj) {
                n
            } else if let Some(k) = ctx.known.and_then(|k| k.lookup(&obj)) {
                if obj.rendition == Rendition::Original {
                    obj.rendition = k.rendition;
                }
                k.name.clone()
            } else {
                key
            };
            b.slot(&name).objects.push(obj);
        }
    }
}

fn stem(name: &str) -> &str {
    let end = name.find(['_', '.']).unwrap_or(name.len());
    &name[..end]
}

fn link_carved(b: &mut Builder, ctx: &AnalysisContext) {
    for obj in ctx.carved {
        let mut obj = obj.clone();
        let name = if let Some(n) = b.name_by_hash(&obj) {
            Some(n)
        } else if let Some(k) = ctx.known.and_then(|k| k.lookup(&obj)) {
            obj.rendition = k.rendition;
            Some(k.name.clone())
        } else {
            let same: Vec<&Slot> = b
                .slots
                .values()
                .filter(|s| s.entry.size_bytes == Some(obj.length))
                .collect();
            (same.len() == 1).then(|| same[0].entry.name.clone())
        };
        if let Some(n) = name {
            b.slot(&n).objects.push(obj);
        }
    }
}

/// Objects not attributed to any entry of the given snapshots.
pub fn unlinked_carved<'a>(
    carved: &'a [RecoveredObject],
    snapshots: &[AppSnapshot],
) -> Vec<&'a RecoveredObject> {
    let linked: BTreeSet<u64> = snapshots
        .iter()
        .flat_map(|s| &s.entries)
        .flat_map(|e| &e.objects)
        .filter_map(|o| match o.origin {
            ObjectOrigin::CarvedAtOffset(off) => Some(off),
            _ => None,
        })
        .collect();
    carved
        .iter()
        .filter(|o| !matches!(o.origin, ObjectOrigin::CarvedAtOffset(off) if linked.contains(&off)))
        .collect()
}

/// Hash algorithm a provider's metadata uses for content, if any.
pub fn provider_hash(provider: Provider, platform: Platform) -> Option<HashAlgorithm> {
    match (provider, platform) {
        (Provider::Dropbox, Platform::Android) => Some(HashAlgorithm::Md5),
        (Provider::Box, _) => Some(HashAlgorithm::Sha1),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_url_template() {
        assert_eq!(
            reconstruct_box_url("u5es7xli4xejrh89kr6xu14tks6grjn3", "2072716499").unwrap(),
            "https://www.box.net/api/1.0/download/u5es7xli4xejrh89kr6xu14tks6grjn3/2072716499"
        );
        assert_eq!(
            reconstruct_box_url("t", "1").unwrap(),
            "https://www.box.net/api/1.0/download/t/1"
        );
        assert!(reconstruct_box_url("", "1").is_err());
        assert!(reconstruct_box_url("t", "").is_err());
    }

    fn object(bytes: &[u8]) -> RecoveredObject {
        RecoveredObject::from_bytes(
            "x",
            ObjectOrigin::CachePath,
            Rendition::Original,
            ContentLocation::TreePath {
                tree: "t".into(),
                path: "/x".into(),
            },
            bytes,
        )
        .unwrap()
    }

    #[test]
    fn entry_hash_verification() {
        use md5::Digest;
        let content = b"synthetic content".to_vec();
        let md5_hex: String = md5::Md5::digest(&content)
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect();
        let sha1_hex: String = sha1::Sha1::digest(&content)
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect();
        let mut e = CloudFileEntry::named("13.pdf");
        assert!(verify_entry_hash(&e, &object(&content)).is_err());
        e.hash = Some(crate::model::ContentHash::new(HashAlgorithm::Md5, &md5_hex).unwrap());
        assert!(verify_entry_hash(&e, &object(&content)).unwrap());
        let mut flipped = content.clone();
        flipped[0] ^= 1;
        assert!(!verify_entry_hash(&e, &object(&flipped)).unwrap());
        e.hash = Some(crate::model::ContentHash::new(HashAlgorithm::Sha1, &sha1_hex).unwrap());
        assert!(verify_entry_hash(&e, &object(&content)).unwrap());
    }

    #[test]
    fn stems() {
        assert_eq!(stem("2072716499_page1.png"), "2072716499");
        assert_eq!(stem("01.jpg"), "01");
    }
}

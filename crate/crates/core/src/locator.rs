//! Artifact location registry and the scanner that resolves it against
//! evidence trees.

use std::collections::{BTreeMap, BTreeSet};

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::evidence::{parent_of, EvidenceTree};
use crate::model::{AppIdentity, AppVersion, Platform, Provider};

pub const IOS_APPLICATIONS: &str = "/private/var/mobile/Applications";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArtifactRole {
    MetadataStore,
    CacheDir,
    OfflineDir,
    ThumbnailDir,
    PreviewDir,
    EncryptedCacheDir,
    LogFile,
    PrefsFile,
}

impl ArtifactRole {
    pub fn is_dir(self) -> bool {
        matches!(
            self,
            ArtifactRole::CacheDir
                | ArtifactRole::OfflineDir
                | ArtifactRole::ThumbnailDir
                | ArtifactRole::PreviewDir
                | ArtifactRole::EncryptedCacheDir
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PathSignature {
    pub provider: Provider,
    pub platform: Platform,
    pub version: String,
    pub role: ArtifactRole,
    pub pattern: String,
    pub provenance: String,
}

impl PathSignature {
    pub fn identity(&self) -> AppIdentity {
        AppIdentity::new(self.provider, self.platform, self.version.clone())
    }

    /// Directory signatures end with `/`.
    pub fn is_dir_pattern(&self) -> bool {
        self.pattern.ends_with('/')
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArtifactHit {
    pub signature: PathSignature,
    pub tree: String,
    pub resolved_path: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub bindings: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub ambiguous: bool,
}

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("registry JSON invalid: {0}")]
    Json(#[from] serde_json::Error),
    #[error("signature pattern `{0}` uses an unknown placeholder")]
    Placeholder(String),
    #[error("signature pattern `{0}` is not absolute")]
    NotAbsolute(String),
}

pub const PLACEHOLDERS: [&str; 4] = ["APPROOT", "EMAIL", "USERID", "X"];

/// Checks that every `{...}` in the pattern is a known placeholder.
pub fn validate_pattern(pattern: &str) -> Result<(), RegistryError> {
    if !pattern.starts_with('/') && !pattern.starts_with("{APPROOT}") {
        return Err(RegistryError::NotAbsolute(pattern.to_string()));
    }
    let mut rest = pattern;
    while let Some(open) = rest.find('{') {
        let close = rest[open..]
            .find('}')
            .ok_or_else(|| RegistryError::Placeholder(pattern.to_string()))?;
        let name = &rest[open + 1..open + close];
        if !PLACEHOLDERS.contains(&name) {
            return Err(RegistryError::Placeholder(pattern.to_string()));
        }
        rest = &rest[open + close + 1..];
    }
    if rest.contains('}') {
        return Err(RegistryError::Placeholder(pattern.to_string()));
    }
    Ok(())
}

pub fn registry_from_json(text: &str) -> Result<Vec<PathSignature>, RegistryError> {
    let sigs: Vec<PathSignature> = serde_json::from_str(text)?;
    for s in &sigs {
        validate_pattern(&s.pattern)?;
    }
    Ok(sigs)
}

pub fn registry_to_json(sigs: &[PathSignature]) -> String {
    serde_json::to_string_pretty(sigs).expect("signatures serialize")
}

type Row = (ArtifactRole, &'static str, &'static str);

fn expand(
    out: &mut Vec<PathSignature>,
    provider: Provider,
    platform: Platform,
    versions: &[&str],
    rows: &[Row],
) {
    for v in versions {
        for (role, pattern, provenance) in rows {
            out.push(PathSignature {
                provider,
                platform,
                version: v.to_string(),
                role: *role,
                pattern: pattern.to_string(),
                provenance: provenance.to_string(),
            });
        }
    }
}

/// The built-in catalog of artifact locations for the twelve studied builds.
pub fn builtin_registry() -> Vec<PathSignature> {
    use ArtifactRole::*;
    use Platform::*;
    use Provider::*;
    let mut r = Vec::new();
    expand(
        &mut r,
        Dropbox,
        Android,
        &["2.1.3", "2.2.2"],
        &[
            (
                ThumbnailDir,
                "/Android/data/com.dropbox.android/cache/thumbs/",
                "dropbox android sd: jpeg thumbnails",
            ),
            (
                CacheDir,
                "/Android/data/com.dropbox.android/files/scratch/",
                "dropbox android sd: offline and viewed documents",
            ),
            (
                MetadataStore,
                "/data/data/com.dropbox.android/databases/db.db",
                "dropbox android: file metadata (table dropbox)",
            ),
            (
                PrefsFile,
                "/data/data/com.dropbox.android/databases/prefs.db",
                "dropbox android: account prefs (table DropboxAccountPrefs)",
            ),
            (
                LogFile,
                "/data/data/com.dropbox.android/files/log.txt",
                "dropbox android: transaction log",
            ),
        ],
    );
    expand(
        &mut r,
        Dropbox,
        Ios,
        &["1.4.7"],
        &[
            (
                CacheDir,
                "{APPROOT}/Library/Caches/Dropbox/",
                "dropbox ios: cached, offline and thumbnail files",
            ),
            (
                MetadataStore,
                "{APPROOT}/Documents/Dropbox.sqlite",
                "dropbox ios: file metadata (table ZCACHEDFILE)",
            ),
            (
                PrefsFile,
                "{APPROOT}/Library/Preferences/com.getdropbox.Dropbox.plist",
                "dropbox ios: account email and favorites",
            ),
            (
                MetadataStore,
                "{APPROOT}/Library/Caches/FavoriteFiles.plist",
                "dropbox ios: favorite file details",
            ),
            (
                LogFile,
                "{APPROOT}/Library/Caches/Analytics.log",
                "dropbox ios: analytics event log",
            ),
            (
                LogFile,
                "{APPROOT}/tmp/run.log",
                "dropbox ios: service transaction log",
            ),
        ],
    );
    expand(
        &mut r,
        Box,
        Android,
        &["1.6.7"],
        &[
            (
                OfflineDir,
                "/Box/{EMAIL}/",
                "box android sd: offline files per account",
            ),
            (
                CacheDir,
                "/Android/data/com.box.android/cache/filecache/",
                "box android sd: viewed file cache",
            ),
            (
                ThumbnailDir,
                "/Android/data/com.box.android/cache/tempfiles/box_tmp_images/",
                "box android sd: jpeg thumbnails",
            ),
            (
                MetadataStore,
                "/data/data/com.box.android/files/json_static_model_{EMAIL}_0",
                "box android: file metadata (json static model)",
            ),
            (
                PrefsFile,
                "/data/data/com.box.android/shared_prefs/myPreference.xml",
                "box android: auth token and email",
            ),
            (
                PrefsFile,
                "/data/data/com.box.android/shared_prefs/Downloaded_Files.xml",
                "box android: downloaded file ids",
            ),
        ],
    );
    expand(
        &mut r,
        Box,
        Android,
        &["2.0.2"],
        &[
            (
                EncryptedCacheDir,
                "/Android/data/com.box.android/cache/dl_cache/",
                "box android sd: encrypted download cache",
            ),
            (
                EncryptedCacheDir,
                "/Android/data/com.box.android/cache/dl_offline/",
                "box android sd: encrypted offline files",
            ),
            (
                EncryptedCacheDir,
                "/Android/data/com.box.android/cache/previews/",
                "box android sd: encrypted previews",
            ),
            (
                ThumbnailDir,
                "/data/data/com.box.android/cache/tempfiles/box_tmp_images/",
                "box android: jpeg thumbnails",
            ),
            (
                CacheDir,
                "/data/data/com.box.android/cache/working/",
                "box android: viewed audio and video",
            ),
            (
                PreviewDir,
                "/data/data/com.box.android/files/previews/",
                "box android: png page snapshots",
            ),
            (
                MetadataStore,
                "/data/data/com.box.android/files/json_static_model_{EMAIL}_0",
                "box android: file metadata (json static model)",
            ),
            (
                PrefsFile,
                "/data/data/com.box.android/shared_prefs/myPreference.xml",
                "box android: auth token and email",
            ),
            (
                PrefsFile,
                "/data/data/com.box.android/shared_prefs/Preview_Num_Pages.xml",
                "box android: preview page counts by id",
            ),
            (
                PrefsFile,
                "/data/data/com.box.android/shared_prefs/offlineFileSharedPreferences.xml",
                "box android: offline file ids",
            ),
        ],
    );
    expand(
        &mut r,
        Box,
        Ios,
        &["2.7.1"],
        &[
            (
                OfflineDir,
                "{APPROOT}/Documents/SavedFiles/",
                "box ios: offline files",
            ),
            (
                ThumbnailDir,
                "{APPROOT}/Library/Caches/Thumbnails/",
                "box ios: jpeg thumbnails",
            ),
            (
                MetadataStore,
                "{APPROOT}/Documents/BoxCoreDataStore.sqlite",
                "box ios: file metadata (table ZBOXBASECOREDATA) and account",
            ),
        ],
    );
    expand(
        &mut r,
        SugarSync,
        Android,
        &["3.6", "3.6.2"],
        &[
            (
                CacheDir,
                "/.sugarsync/",
                "sugarsync android sd: viewed pdf cache",
            ),
            (
                CacheDir,
                "/.sugarsync/.httpfilecache/",
                "sugarsync android sd: http cache with thumbnails",
            ),
            (
                OfflineDir,
                "/MySugarSyncFolders/",
                "sugarsync android sd: offline files",
            ),
            (
                PrefsFile,
                "/data/data/com.sharpcast.sugarsync/app_SugarSync/SugarSync/sc_appdata",
                "sugarsync android: account email, id and password hash",
            ),
            (
                LogFile,
                "/data/data/com.sharpcast.sugarsync/app_SugarSync/SugarSync/log/sugarsync.log",
                "sugarsync android: service log",
            ),
            (
                MetadataStore,
                "/data/data/com.sharpcast.sugarsync/databases/SugarSyncDB",
                "sugarsync android: offline file metadata (rec_to_offline_file tables)",
            ),
        ],
    );
    expand(
        &mut r,
        SugarSync,
        Ios,
        &["3.0"],
        &[
            (
                CacheDir,
                "{APPROOT}/tmp/http_cache/",
                "sugarsync ios: http cache",
            ),
            (
                CacheDir,
                "{APPROOT}/tmp/cache/",
                "sugarsync ios: audio cache",
            ),
            (
                OfflineDir,
                "{APPROOT}/Documents/MyiPhone/",
                "sugarsync ios: offline files",
            ),
            (
                PrefsFile,
                "{APPROOT}/Documents/ringo.appdata",
                "sugarsync ios: account details",
            ),
            (
                MetadataStore,
                "{APPROOT}/Documents/Ringo.sqlite",
                "sugarsync ios: offline file metadata (table ZSYNCOBJECT)",
            ),
        ],
    );
    expand(&mut r, Syncplicity, Android, &["1.7"], &[
        (ThumbnailDir, "/Android/data/com.syncplicity.android/cache/cacheifu/image_cache/", "syncplicity android sd: jpeg thumbnails"),
        (ThumbnailDir, "/Android/data/com.syncplicity.android/cache/cachefu/image_cache/", "syncplicity android sd: jpeg thumbnails (alternate spelling)"),
        (OfflineDir, "/Syncplicity/", "syncplicity android sd: offline files"),
        (EncryptedCacheDir, "/Android/data/com.syncplicity.android/cache/private_syncp_file_cache_v3/encrypted/{USERID}/", "syncplicity android sd: encrypted file cache"),
        (CacheDir, "/data/data/com.syncplicity.android/files/", "syncplicity android: file cache (deleted residue)"),
        (MetadataStore, "/data/data/com.syncplicity.android/databases/CacheDatabase.sqlite", "syncplicity android: file metadata (table Files)"),
    ]);
    expand(&mut r, Syncplicity, Android, &["2.1.1"], &[
        (ThumbnailDir, "/Android/data/com.syncplicity.android/cache/cachefu/image_cache/", "syncplicity android sd: jpeg thumbnails"),
        (EncryptedCacheDir, "/Android/data/com.syncplicity.android/encrypted_storage/", "syncplicity android sd: encrypted storage"),
        (CacheDir, "/Android/data/com.syncplicity.android/temporary_decrypted_storage/", "syncplicity android sd: decrypted file cache"),
        (LogFile, "/data/data/com.syncplicity.android/app_log_syncplicity/00000000000000000000.log.gz.tmp", "syncplicity android: application log"),
        (MetadataStore, "/data/data/com.syncplicity.android/databases/VIRTUAL_FILE_SYSTEM.db", "syncplicity android: file metadata (table Files)"),
    ]);
    expand(&mut r, Syncplicity, Android, &["1.7", "2.1.1"], &[
        (PrefsFile, "/data/data/com.syncplicity/shared_prefs/auth_prefs.xml", "syncplicity android: account email"),
        (PrefsFile, "/data/data/com.syncplicity.android/shared_prefs/auth_prefs.xml", "syncplicity android: account email (package spelling)"),
        (PrefsFile, "/data/data/com.syncplicity/shared_prefs/file_cache_preferences{X}.deleted.xml", "syncplicity android: encrypted cache name mapping"),
        (PrefsFile, "/data/data/com.syncplicity.android/shared_prefs/file_cache_preferences{X}.deleted.xml", "syncplicity android: encrypted cache name mapping (package spelling)"),
    ]);
    expand(
        &mut r,
        Syncplicity,
        Ios,
        &["1.6"],
        &[
            (
                CacheDir,
                "{APPROOT}/Documents/",
                "syncplicity ios: document cache",
            ),
            (
                MetadataStore,
                "{APPROOT}/Documents/syncplicity.sqlite",
                "syncplicity ios: file metadata (table ZFILES)",
            ),
            (
                PrefsFile,
                "{APPROOT}/library/preferences/com.syncplicity.ios/syncplicity.plist",
                "syncplicity ios: account name and type",
            ),
            (
                LogFile,
                "{APPROOT}/library/caches/syncplicity_0.log",
                "syncplicity ios: service log",
            ),
        ],
    );
    r
}

/// Files whose presence in an iOS application folder identifies the provider.
pub fn ios_probe(provider: Provider) -> &'static str {
    match provider {
        Provider::Dropbox => "Documents/Dropbox.sqlite",
        Provider::Box => "Documents/BoxCoreDataStore.sqlite",
        Provider::SugarSync => "Documents/Ringo.sqlite",
        Provider::Syncplicity => "Documents/syncplicity.sqlite",
    }
}

fn is_app_folder_name(name: &str) -> bool {
    (32..=36).contains(&name.len()) && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-')
}

/// Providers whose probe file exists under an iOS application folder.
pub fn probe_app_folder(tree: &EvidenceTree, approot: &str) -> Vec<Provider> {
    Provider::ALL
        .into_iter()
        .filter(|p| {
            tree.resolve(&format!("{approot}/{}", ios_probe(*p)))
                .is_some()
        })
        .collect()
}

struct Compiled {
    sig: PathSignature,
    names: Vec<String>,
    exact: Regex,
    folded: Regex,
}

fn compile(sig: &PathSignature) -> Compiled {
    let body = sig.pattern.trim_end_matches('/');
    let body = body.strip_prefix("{APPROOT}").unwrap_or(body);
    let mut re = String::new();
    let mut names = Vec::new();
    let mut rest = body;
    while let Some(open) = rest.find('{') {
        re.push_str(&regex::escape(&rest[..open]));
        let close = open + rest[open..].find('}').expect("validated pattern");
        let name = &rest[open + 1..close];
        re.push_str(match name {
            "EMAIL" => "([^/]+@[^/]+)",
            _ => "([^/]+)",
        });
        names.push(name.to_string());
        rest = &rest[close + 1..];
    }
    re.push_str(&regex::escape(rest));
    let exact = Regex::new(&format!("^{re}$")).expect("pattern regex");
    let folded = Regex::new(&format!("(?i)^{re}$")).expect("pattern regex");
    Compiled {
        sig: sig.clone(),
        names,
        exact,
        folded,
    }
}

/// Resolves every signature against the trees. Android patterns are matched
/// from the tree root; iOS patterns under each application folder whose
/// probe identifies the signature's provider. A signature that finds no
/// exact-case match is retried case-insensitively.
pub fn scan(trees: &[&EvidenceTree], registry: &[PathSignature]) -> Vec<ArtifactHit> {
    let compiled: Vec<Compiled> = registry.iter().map(compile).collect();
    let mut hits = Vec::new();
    for tree in trees {
        let files: Vec<&str> = tree.paths().collect();
        let dirs: Vec<&str> = tree.dirs().collect();
        // Android: whole tree, root "" prefix.
        let mut roots: Vec<(String, Option<Vec<Provider>>)> = vec![(String::new(), None)];
        if tree.resolve(IOS_APPLICATIONS).is_some() {
            let apps = tree.resolve(IOS_APPLICATIONS).unwrap();
            for d in tree.subdirs(&apps) {
                let name = crate::evidence::file_name_of(d);
                if is_app_folder_name(name) {
                    roots.push((d.to_string(), Some(probe_app_folder(tree, d))));
                }
            }
        }
        for c in &compiled {
            let ios = c.sig.pattern.starts_with("{APPROOT}");
            let candidates = if c.sig.is_dir_pattern() {
                &dirs
            } else {
                &files
            };
            for (root, probed) in &roots {
                let (ambiguous, prefix) = match (ios, probed) {
                    (false, None) => (false, ""),
                    (true, Some(p)) if p.contains(&c.sig.provider) => (p.len() > 1, root.as_str()),
                    _ => continue,
                };
                let mut found = match_paths(c, &c.exact, candidates, prefix);
                if found.is_empty() {
                    found = match_paths(c, &c.folded, candidates, prefix);
                }
                for (path, mut bindings) in found {
                    if ios {
                        bindings.insert("APPROOT".to_string(), root.clone());
                    }
                    hits.push(ArtifactHit {
                        signature: c.sig.clone(),
                        tree: tree.label().to_string(),
                        resolved_path: path,
                        bindings,
                        ambiguous,
                    });
                }
            }
        }
    }
    hits
}

fn match_paths(
    c: &Compiled,
    re: &Regex,
    candidates: &[&str],
    prefix: &str,
) -> Vec<(String, BTreeMap<String, String>)> {
    let mut out = Vec::new();
    for p in candidates {
        let Some(rel) = p.strip_prefix(prefix) else {
            continue;
        };
        if !prefix.is_empty() && !rel.starts_with('/') {
            continue;
        }
        if let Some(caps) = re.captures(rel) {
            let bindings = c
                .names
                .iter()
                .enumerate()
                .map(|(i, n)| (n.clone(), caps[i + 1].to_string()))
                .collect();
            out.push((p.to_string(), bindings));
        }
    }
    out
}

/// One application found on the evidence, with its hits deduplicated.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectedApp {
    pub identity: AppIdentity,
    pub hits: Vec<ArtifactHit>,
    /// Cataloged versions consistent with the evidence when the version
    /// could not be singled out.
    pub candidate_versions: Vec<String>,
}

/// Groups hits by provider and platform and infers the version from
/// signatures unique to one cataloged version.
pub fn detect_apps(hits: &[ArtifactHit], registry: &[PathSignature]) -> Vec<DetectedApp> {
    let mut groups: BTreeMap<(Provider, Platform), Vec<&ArtifactHit>> = BTreeMap::new();
    for h in hits {
        groups
            .entry((h.signature.provider, h.signature.platform))
            .or_default()
            .push(h);
    }
    let mut out = Vec::new();
    for ((provider, platform), group) in groups {
        let versions: BTreeSet<&str> = registry
            .iter()
            .filter(|s| s.provider == provider && s.platform == platform)
            .map(|s| s.version.as_str())
            .collect();
        let key = |s: &PathSignature| (s.role, s.pattern.clone());
        let mut unique_hit: BTreeSet<&str> = BTreeSet::new();
        for h in &group {
            let k = key(&h.signature);
            let shared = registry.iter().any(|s| {
                s.provider == provider
                    && s.platform == platform
                    && s.version != h.signature.version
                    && key(s) == k
            });
            if !shared {
                unique_hit.insert(h.signature.version.as_str());
            }
        }
        let (version, candidates) = if unique_hit.len() == 1 {
            (
                AppVersion::new(*unique_hit.iter().next().unwrap()),
                Vec::new(),
            )
        } else if unique_hit.is_empty() && versions.len() == 1 {
            (
                AppVersion::new(*versions.iter().next().unwrap()),
                Vec::new(),
            )
        } else {
            let pool: Vec<String> = if unique_hit.is_empty() {
                versions.iter().map(|v| v.to_string()).collect()
            } else {
                unique_hit.iter().map(|v| v.to_string()).collect()
            };
            (AppVersion::unknown(), pool)
        };
        // One hit per (tree, path, role), preferring the resolved version's signature.
        let mut dedup: BTreeMap<(String, String, ArtifactRole), ArtifactHit> = BTreeMap::new();
        for h in group {
            let k = (h.tree.clone(), h.resolved_path.clone(), h.signature.role);
            let better = h.signature.version == version.as_str();
            match dedup.get(&k) {
                Some(existing) if existing.signature.version == version.as_str() || !better => {}
                _ => {
                    dedup.insert(k, h.clone());
                }
            }
        }
        out.push(DetectedApp {
            identity: AppIdentity {
                provider,
                platform,
                version,
            },
            hits: dedup.into_values().collect(),
            candidate_versions: candidates,
        });
    }
    out
}

/// Parent directory of the hit, used for reporting.
pub fn hit_dir(hit: &ArtifactHit) -> &str {
    if hit.signature.role.is_dir() {
        &hit.resolved_path
    } else {
        parent_of(&hit.resolved_path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn tree(paths: &[&str]) -> EvidenceTree {
        EvidenceTree::from_memory(
            "internal",
            paths.iter().map(|p| (*p, Arc::<[u8]>::from(&b"x"[..]))),
        )
    }

    #[test]
    fn registry_examples() {
        let r = builtin_registry();
        assert!(r.iter().any(|s| s.role == ArtifactRole::MetadataStore
            && s.pattern == "/data/data/com.dropbox.android/databases/db.db"));
        assert!(r.iter().any(|s| s.role == ArtifactRole::OfflineDir
            && s.pattern == "/Box/{EMAIL}/"
            && s.version == "1.6.7"));
        assert!(r.iter().any(|s| s.role == ArtifactRole::EncryptedCacheDir
            && s.pattern.ends_with("encrypted_storage/")
            && s.version == "2.1.1"));
        assert!(r.len() >= 40);
        let ids: BTreeSet<AppIdentity> = r.iter().map(|s| s.identity()).collect();
        assert_eq!(ids.len(), 12);
        assert!(ids.iter().all(|i| i.is_cataloged()));
        for s in &r {
            validate_pattern(&s.pattern).unwrap();
            assert_eq!(s.role.is_dir(), s.is_dir_pattern(), "{}", s.pattern);
        }
    }

    #[test]
    fn registry_round_trip() {
        let r = builtin_registry();
        assert_eq!(registry_from_json(&registry_to_json(&r)).unwrap(), r);
    }

    #[test]
    fn bad_placeholder_rejected() {
        assert!(validate_pattern("/a/{NAME}/b").is_err());
        assert!(validate_pattern("relative/path").is_err());
        assert!(validate_pattern("/a/{X}/b").is_ok());
    }

    #[test]
    fn empty_tree_no_hits() {
        let t = tree(&[]);
        assert!(scan(&[&t], &builtin_registry()).is_empty());
    }

    #[test]
    fn ios_app_folder_probe() {
        let t = tree(&[
            "/private/var/mobile/Applications/A1B2C3D4E5F6A7B8C9D0E1F2A3B4C5D6/Documents/Dropbox.sqlite",
            "/private/var/mobile/Applications/A1B2C3D4E5F6A7B8C9D0E1F2A3B4C5D6/tmp/run.log",
        ]);
        let hits = scan(&[&t], &builtin_registry());
        assert_eq!(hits.len(), 2);
        assert!(hits
            .iter()
            .all(|h| h.signature.provider == Provider::Dropbox && !h.ambiguous));
        assert_eq!(
            hits[0].bindings["APPROOT"],
            "/private/var/mobile/Applications/A1B2C3D4E5F6A7B8C9D0E1F2A3B4C5D6"
        );
        let apps = detect_apps(&hits, &builtin_registry());
        assert_eq!(apps.len(), 1);
        assert_eq!(
            apps[0].identity,
            AppIdentity::new(Provider::Dropbox, Platform::Ios, "1.4.7")
        );
    }

    #[test]
    fn ambiguous_probe_flagged() {
        let root = "/private/var/mobile/Applications/0123456789abcdef0123456789abcdef";
        let t = tree(&[
            &format!("{root}/Documents/Dropbox.sqlite"),
            &format!("{root}/Documents/Ringo.sqlite"),
        ]);
        let hits = scan(&[&t], &builtin_registry());
        assert_eq!(hits.len(), 2);
        assert!(hits.iter().all(|h| h.ambiguous));
    }

    #[test]
    fn short_folder_names_ignored() {
        let t = tree(&["/private/var/mobile/Applications/short/Documents/Dropbox.sqlite"]);
        assert!(scan(&[&t], &builtin_registry()).is_empty());
    }

    #[test]
    fn placeholder_bindings_and_case_fallback() {
        let t = tree(&[
            "/data/data/com.box.android/files/json_static_model_jane@example.com_0",
            "/Box/jane@example.com/02.jpg",
        ]);
        let hits = scan(&[&t], &builtin_registry());
        let json = hits
            .iter()
            .find(|h| h.signature.role == ArtifactRole::MetadataStore)
            .unwrap();
        assert_eq!(json.bindings["EMAIL"], "jane@example.com");
        let root = "/private/var/mobile/Applications/0123456789abcdef0123456789abcdef";
        let t = tree(&[
            &format!("{root}/Documents/syncplicity.sqlite"),
            &format!("{root}/Library/Preferences/com.syncplicity.ios/syncplicity.plist"),
        ]);
        let hits = scan(&[&t], &builtin_registry());
        assert!(hits
            .iter()
            .any(|h| h.signature.role == ArtifactRole::PrefsFile
                && h.resolved_path
                    .ends_with("Library/Preferences/com.syncplicity.ios/syncplicity.plist")));
    }

    #[test]
    fn version_inference() {
        let t = tree(&[
            "/data/data/com.box.android/shared_prefs/myPreference.xml",
            "/data/data/com.box.android/shared_prefs/offlineFileSharedPreferences.xml",
        ]);
        let reg = builtin_registry();
        let apps = detect_apps(&scan(&[&t], &reg), &reg);
        assert_eq!(apps[0].identity.version.as_str(), "2.0.2");
        assert_eq!(apps[0].hits.len(), 2);

        let t = tree(&["/data/data/com.dropbox.android/databases/db.db"]);
        let apps = detect_apps(&scan(&[&t], &reg), &reg);
        assert!(apps[0].identity.version.is_unknown());
        assert_eq!(apps[0].candidate_versions, vec!["2.1.3", "2.2.2"]);
        assert_eq!(apps[0].hits.len(), 1);
    }

    #[test]
    fn hits_are_tree_paths() {
        let t = tree(&[
            "/data/data/com.dropbox.android/databases/db.db",
            "/data/data/com.dropbox.android/files/log.txt",
            "/unrelated/file",
        ])
        .with_dir("/Android/data/com.dropbox.android/cache/thumbs");
        for h in scan(&[&t], &builtin_registry()) {
            assert!(t.is_file(&h.resolved_path) || t.is_dir(&h.resolved_path));
        }
    }
}

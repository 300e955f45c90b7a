//! Domain vocabulary shared by the readers, analyzers and reports.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Seconds between 1970-01-01T00:00Z and 2001-01-01T00:00Z.
pub const APPLE_EPOCH_OFFSET: f64 = 978_307_200.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provider {
    Box,
    Dropbox,
    SugarSync,
    Syncplicity,
}

impl Provider {
    pub const ALL: [Provider; 4] = [
        Provider::Dropbox,
        Provider::Box,
        Provider::SugarSync,
        Provider::Syncplicity,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Provider::Box => "box",
            Provider::Dropbox => "dropbox",
            Provider::SugarSync => "sugarsync",
            Provider::Syncplicity => "syncplicity",
        }
    }
}

impl fmt::Display for Provider {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Provider {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "box" => Ok(Provider::Box),
            "dropbox" => Ok(Provider::Dropbox),
            "sugarsync" => Ok(Provider::SugarSync),
            "syncplicity" => Ok(Provider::Syncplicity),
            _ => Err(ModelError::UnknownName(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Platform {
    Android,
    Ios,
}

impl Platform {
    pub fn as_str(self) -> &'static str {
        match self {
            Platform::Android => "android",
            Platform::Ios => "ios",
        }
    }
}

impl fmt::Display for Platform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Platform {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "android" => Ok(Platform::Android),
            "ios" => Ok(Platform::Ios),
            _ => Err(ModelError::UnknownName(s.to_string())),
        }
    }
}

/// Application version string, or the `unknown_version` marker when the
/// evidence matched a provider but no cataloged version could be singled out.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AppVersion(String);

impl AppVersion {
    pub const UNKNOWN: &'static str = "unknown_version";

    pub fn new(v: impl Into<String>) -> Self {
        AppVersion(v.into())
    }

    pub fn unknown() -> Self {
        AppVersion(Self::UNKNOWN.to_string())
    }

    pub fn is_unknown(&self) -> bool {
        self.0 == Self::UNKNOWN
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for AppVersion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AppIdentity {
    pub provider: Provider,
    pub platform: Platform,
    pub version: AppVersion,
}

/// The twelve studied application builds.
pub const CATALOG: [(Provider, Platform, &str); 12] = [
    (Provider::Dropbox, Platform::Android, "2.1.3"),
    (Provider::Dropbox, Platform::Android, "2.2.2"),
    (Provider::Dropbox, Platform::Ios, "1.4.7"),
    (Provider::Box, Platform::Android, "1.6.7"),
    (Provider::Box, Platform::Android, "2.0.2"),
    (Provider::Box, Platform::Ios, "2.7.1"),
    (Provider::SugarSync, Platform::Android, "3.6"),
    (Provider::SugarSync, Platform::Android, "3.6.2"),
    (Provider::SugarSync, Platform::Ios, "3.0"),
    (Provider::Syncplicity, Platform::Android, "1.7"),
    (Provider::Syncplicity, Platform::Android, "2.1.1"),
    (Provider::Syncplicity, Platform::Ios, "1.6"),
];

impl AppIdentity {
    pub fn new(provider: Provider, platform: Platform, version: impl Into<String>) -> Self {
        AppIdentity {
            provider,
            platform,
            version: AppVersion::new(version),
        }
    }

    /// Checked constructor: the version must be cataloged for the
    /// provider/platform pair, or be the `unknown_version` marker.
    pub fn checked(
        provider: Provider,
        platform: Platform,
        version: &str,
    ) -> Result<Self, ModelError> {
        let id = AppIdentity::new(provider, platform, version);
        if id.version.is_unknown() || id.is_cataloged() {
            Ok(id)
        } else {
            Err(ModelError::UncatalogedIdentity(id.to_string()))
        }
    }

    pub fn is_cataloged(&self) -> bool {
        CATALOG.iter().any(|(p, pl, v)| {
            *p == self.provider && *pl == self.platform && *v == self.version.as_str()
        })
    }

    pub fn all_cataloged() -> Vec<AppIdentity> {
        CATALOG
            .iter()
            .map(|(p, pl, v)| AppIdentity::new(*p, *pl, *v))
            .collect()
    }

    /// Cataloged versions sharing this identity's provider and platform.
    pub fn sibling_versions(&self) -> Vec<&'static str> {
        CATALOG
            .iter()
            .filter(|(p, pl, _)| *p == self.provider && *pl == self.platform)
            .map(|(_, _, v)| *v)
            .collect()
    }
}

impl fmt::Display for AppIdentity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}", self.provider, self.platform, self.version)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeviceState {
    ActivePowerState,
    CacheCleared,
    PoweredDown,
    CacheClearedPoweredDown,
}

impl DeviceState {
    pub const ALL: [DeviceState; 4] = [
        DeviceState::ActivePowerState,
        DeviceState::CacheCleared,
        DeviceState::PoweredDown,
        DeviceState::CacheClearedPoweredDown,
    ];

    pub fn cache_cleared(self) -> bool {
        matches!(
            self,
            DeviceState::CacheCleared | DeviceState::CacheClearedPoweredDown
        )
    }

    pub fn powered_down(self) -> bool {
        matches!(
            self,
            DeviceState::PoweredDown | DeviceState::CacheClearedPoweredDown
        )
    }

    pub fn short_label(self) -> &'static str {
        match self {
            DeviceState::ActivePowerState => "APS",
            DeviceState::CacheCleared => "CC",
            DeviceState::PoweredDown => "PWD",
            DeviceState::CacheClearedPoweredDown => "CC&PWD",
        }
    }
}

impl std::str::FromStr for DeviceState {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace(['-', ' '], "_").as_str() {
            "aps" | "active_power_state" => Ok(DeviceState::ActivePowerState),
            "cc" | "cache_cleared" => Ok(DeviceState::CacheCleared),
            "pwd" | "powered_down" => Ok(DeviceState::PoweredDown),
            "cc&pwd" | "cc_pwd" | "cache_cleared_powered_down" => {
                Ok(DeviceState::CacheClearedPoweredDown)
            }
            _ => Err(ModelError::UnknownName(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Epoch {
    UnixSeconds,
    AppleAbsoluteSeconds,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaggedTimestamp {
    pub epoch: Epoch,
    pub value: f64,
}

impl TaggedTimestamp {
    pub fn new(epoch: Epoch, value: f64) -> Result<Self, ModelError> {
        if !value.is_finite() {
            return Err(ModelError::NonFiniteTimestamp);
        }
        Ok(TaggedTimestamp { epoch, value })
    }

    pub fn unix(value: f64) -> Self {
        TaggedTimestamp {
            epoch: Epoch::UnixSeconds,
            value,
        }
    }

    pub fn apple(value: f64) -> Self {
        TaggedTimestamp {
            epoch: Epoch::AppleAbsoluteSeconds,
            value,
        }
    }

    pub fn to_unix_seconds(&self) -> f64 {
        to_unix_seconds(self)
    }
}

pub fn to_unix_seconds(t: &TaggedTimestamp) -> f64 {
    match t.epoch {
        Epoch::UnixSeconds => t.value,
        Epoch::AppleAbsoluteSeconds => t.value + APPLE_EPOCH_OFFSET,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HashAlgorithm {
    Md5,
    Sha1,
}

impl HashAlgorithm {
    pub fn hex_len(self) -> usize {
        match self {
            HashAlgorithm::Md5 => 32,
            HashAlgorithm::Sha1 => 40,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ContentHash {
    pub algorithm: HashAlgorithm,
    pub hex: String,
}

impl ContentHash {
    pub fn new(algorithm: HashAlgorithm, hex: &str) -> Result<Self, ModelError> {
        let hex = hex.trim().to_ascii_lowercase();
        if hex.len() != algorithm.hex_len() || !hex.bytes().all(|b| b.is_ascii_hexdigit()) {
            return Err(ModelError::BadHash { algorithm, hex });
        }
        Ok(ContentHash { algorithm, hex })
    }
}

impl fmt::Display for ContentHash {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let alg = match self.algorithm {
            HashAlgorithm::Md5 => "md5",
            HashAlgorithm::Sha1 => "sha1",
        };
        write!(f, "{alg}:{}", self.hex)
    }
}

/// A loosely typed value carried verbatim from a source record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Null,
    Bool(bool),
    Integer(i64),
    Real(f64),
    Text(String),
    Bytes { hex: String },
}

impl Scalar {
    pub fn bytes(b: &[u8]) -> Self {
        Scalar::Bytes {
            hex: crate::hashing::to_hex(b),
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        match self {
            Scalar::Integer(i) => Some(*i),
            Scalar::Real(r) if r.fract() == 0.0 && r.abs() < 9.0e18 => Some(*r as i64),
            Scalar::Text(s) => s.trim().parse().ok(),
            Scalar::Bool(b) => Some(*b as i64),
            _ => None,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Scalar::Integer(i) => Some(*i as f64),
            Scalar::Real(r) => Some(*r),
            Scalar::Text(s) => s.trim().parse().ok(),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Scalar::Text(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Scalar::Bool(b) => Some(*b),
            Scalar::Integer(i) => Some(*i != 0),
            Scalar::Text(s) => match s.trim().to_ascii_lowercase().as_str() {
                "true" | "yes" | "1" => Some(true),
                "false" | "no" | "0" => Some(false),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn is_null(&self) -> bool {
        matches!(self, Scalar::Null)
    }

    /// Render for text output and for string-typed entry fields.
    pub fn render(&self) -> String {
        match self {
            Scalar::Null => String::new(),
            Scalar::Bool(b) => b.to_string(),
            Scalar::Integer(i) => i.to_string(),
            Scalar::Real(r) => r.to_string(),
            Scalar::Text(s) => s.clone(),
            Scalar::Bytes { hex } => hex.clone(),
        }
    }
}

/// One file as described by recovered metadata.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CloudFileEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub remote_id: Option<String>,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size_bytes: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hash: Option<ContentHash>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub created: Option<TaggedTimestamp>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modified: Option<TaggedTimestamp>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub last_viewed: Option<TaggedTimestamp>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub favorite: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deleted_flag: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thumbnail_url: Option<String>,
    /// Metadata store the entry came from; `None` when the entry is known
    /// only from content objects or a reference hash set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_artifact: Option<String>,
    /// Source columns with no dedicated field, keyed by their source name.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extras: BTreeMap<String, Scalar>,
}

impl CloudFileEntry {
    pub fn named(name: impl Into<String>) -> Self {
        CloudFileEntry {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn has_metadata_row(&self) -> bool {
        self.source_artifact.is_some()
    }

    /// Field-wise merge preferring values already present. Returns a
    /// description of every field where both sides disagree.
    pub fn merge_from(&mut self, other: &CloudFileEntry) -> Vec<String> {
        let mut conflicts = Vec::new();
        fn take<T: Clone + PartialEq + fmt::Debug>(
            field: &str,
            mine: &mut Option<T>,
            theirs: &Option<T>,
            conflicts: &mut Vec<String>,
        ) {
            match (mine.as_ref(), theirs) {
                (None, Some(v)) => *mine = Some(v.clone()),
                (Some(a), Some(b)) if a != b => {
                    conflicts.push(format!("{field}: {a:?} vs {b:?}"));
                }
                _ => {}
            }
        }
        take(
            "remote_id",
            &mut self.remote_id,
            &other.remote_id,
            &mut conflicts,
        );
        take(
            "size_bytes",
            &mut self.size_bytes,
            &other.size_bytes,
            &mut conflicts,
        );
        take("hash", &mut self.hash, &other.hash, &mut conflicts);
        take("created", &mut self.created, &other.created, &mut conflicts);
        take(
            "modified",
            &mut self.modified,
            &other.modified,
            &mut conflicts,
        );
        take(
            "last_viewed",
            &mut self.last_viewed,
            &other.last_viewed,
            &mut conflicts,
        );
        take(
            "favorite",
            &mut self.favorite,
            &other.favorite,
            &mut conflicts,
        );
        take(
            "deleted_flag",
            &mut self.deleted_flag,
            &other.deleted_flag,
            &mut conflicts,
        );
        take(
            "thumbnail_url",
            &mut self.thumbnail_url,
            &other.thumbnail_url,
            &mut conflicts,
        );
        if self.source_artifact.is_none() {
            self.source_artifact = other.source_artifact.clone();
        }
        for (k, v) in &other.extras {
            self.extras.entry(k.clone()).or_insert_with(|| v.clone());
        }
        conflicts
    }
}

/// How strongly a file was recovered. Variants are declared weakest first so
/// the derived order is the strength order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecoveryStatus {
    NotObserved,
    EncryptedCacheOnly,
    MetadataOnly,
    PreviewOnly,
    ThumbnailOnly,
    CarvedDeleted,
    RecoveredUnverified,
    RecoveredIntact,
}

/// Cell vocabulary of the recovery tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableMark {
    Recovered,
    Deleted,
    Thumbnail,
    Blank,
}

impl TableMark {
    pub fn symbol(self) -> char {
        match self {
            TableMark::Recovered => '✓',
            TableMark::Deleted => 'D',
            TableMark::Thumbnail => 'T',
            TableMark::Blank => ' ',
        }
    }
}

impl RecoveryStatus {
    pub fn is_recovered(self) -> bool {
        matches!(
            self,
            RecoveryStatus::RecoveredIntact | RecoveryStatus::RecoveredUnverified
        )
    }

    /// Counted as a recovered file in multi-device totals (thumbnails excluded).
    pub fn counts_as_recovered(self) -> bool {
        self.is_recovered() || self == RecoveryStatus::CarvedDeleted
    }

    pub fn table_mark(self) -> TableMark {
        match self {
            RecoveryStatus::RecoveredIntact | RecoveryStatus::RecoveredUnverified => {
                TableMark::Recovered
            }
            RecoveryStatus::CarvedDeleted => TableMark::Deleted,
            RecoveryStatus::ThumbnailOnly => TableMark::Thumbnail,
            _ => TableMark::Blank,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RecoveryStatus::NotObserved => "not_observed",
            RecoveryStatus::EncryptedCacheOnly => "encrypted_cache_only",
            RecoveryStatus::MetadataOnly => "metadata_only",
            RecoveryStatus::PreviewOnly => "preview_only",
            RecoveryStatus::ThumbnailOnly => "thumbnail_only",
            RecoveryStatus::CarvedDeleted => "carved_deleted",
            RecoveryStatus::RecoveredUnverified => "recovered_unverified",
            RecoveryStatus::RecoveredIntact => "recovered_intact",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AccountInfo {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub email: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub display_name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub user_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub auth_token: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub password_hash: Option<String>,
}

impl AccountInfo {
    pub fn is_identified(&self) -> bool {
        self.email.is_some()
            || self.display_name.is_some()
            || self.user_id.is_some()
            || self.auth_token.is_some()
            || self.password_hash.is_some()
    }

    /// Fill empty fields from `other`.
    pub fn absorb(&mut self, other: AccountInfo) {
        fn fill(a: &mut Option<String>, b: Option<String>) {
            if a.is_none() {
                *a = b;
            }
        }
        fill(&mut self.email, other.email);
        fill(&mut self.display_name, other.display_name);
        fill(&mut self.user_id, other.user_id);
        fill(&mut self.auth_token, other.auth_token);
        fill(&mut self.password_hash, other.password_hash);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogEvent {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<TaggedTimestamp>,
    pub event_kind: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub attributes: BTreeMap<String, Scalar>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectOrigin {
    CachePath,
    OfflineDir,
    ThumbnailDir,
    PreviewDir,
    CarvedAtOffset(u64),
}

impl ObjectOrigin {
    pub fn is_carved(self) -> bool {
        matches!(self, ObjectOrigin::CarvedAtOffset(_))
    }
}

/// What the bytes of a recovered object are relative to the cloud file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rendition {
    Original,
    Thumbnail,
    Preview,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContentLocation {
    /// Path inside the named evidence tree.
    TreePath { tree: String, path: String },
    /// Byte extent inside a raw image.
    ImageExtent {
        image: String,
        offset: u64,
        length: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecoveredObject {
    pub logical_name: String,
    pub origin: ObjectOrigin,
    pub rendition: Rendition,
    pub content: ContentLocation,
    pub length: u64,
    pub md5: String,
    pub sha1: String,
}

impl RecoveredObject {
    /// Builds an object from its bytes, computing both digests.
    pub fn from_bytes(
        logical_name: impl Into<String>,
        origin: ObjectOrigin,
        rendition: Rendition,
        content: ContentLocation,
        bytes: &[u8],
    ) -> Result<Self, ModelError> {
        if bytes.is_empty() {
            return Err(ModelError::EmptyObject);
        }
        Ok(RecoveredObject {
            logical_name: logical_name.into(),
            origin,
            rendition,
            content,
            length: bytes.len() as u64,
            md5: crate::hashing::md5_hex(bytes),
            sha1: crate::hashing::sha1_hex(bytes),
        })
    }

    pub fn digest(&self, algorithm: HashAlgorithm) -> &str {
        match algorithm {
            HashAlgorithm::Md5 => &self.md5,
            HashAlgorithm::Sha1 => &self.sha1,
        }
    }

    pub fn matches_hash(&self, hash: &ContentHash) -> bool {
        self.digest(hash.algorithm) == hash.hex
    }
}

/// One reconstructed file of a snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotEntry {
    pub entry: CloudFileEntry,
    pub status: RecoveryStatus,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub objects: Vec<RecoveredObject>,
    /// Every store that described this entry.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sources: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub download_url: Option<String>,
}

/// Artifact location recorded in a snapshot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtifactRecord {
    pub role: crate::locator::ArtifactRole,
    pub tree: String,
    pub path: String,
    pub provenance: String,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub ambiguous: bool,
}

/// Per-device, per-app reconstruction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppSnapshot {
    pub identity: AppIdentity,
    pub account: AccountInfo,
    pub entries: Vec<SnapshotEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub events: Vec<LogEvent>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub artifacts: Vec<ArtifactRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl AppSnapshot {
    pub fn entry(&self, name: &str) -> Option<&SnapshotEntry> {
        self.entries.iter().find(|e| e.entry.name == name)
    }

    pub fn status_of(&self, name: &str) -> RecoveryStatus {
        self.entry(name)
            .map(|e| e.status)
            .unwrap_or(RecoveryStatus::NotObserved)
    }

    pub fn recovered_names(&self) -> Vec<&str> {
        self.entries
            .iter()
            .filter(|e| e.status.counts_as_recovered())
            .map(|e| e.entry.name.as_str())
            .collect()
    }
}

/// Strongest status supported by the objects linked to `entry`.
///
/// Hash mismatches on non-carved originals downgrade to
/// [`RecoveryStatus::RecoveredUnverified`] and push a warning.
pub fn classify_status(
    entry: &CloudFileEntry,
    objects: &[RecoveredObject],
    warnings: &mut Vec<String>,
) -> RecoveryStatus {
    let base = if entry.has_metadata_row() {
        RecoveryStatus::MetadataOnly
    } else {
        RecoveryStatus::NotObserved
    };
    objects
        .iter()
        .map(|obj| object_status(entry, obj, warnings))
        .fold(base, RecoveryStatus::max)
}

fn object_status(
    entry: &CloudFileEntry,
    obj: &RecoveredObject,
    warnings: &mut Vec<String>,
) -> RecoveryStatus {
    match obj.rendition {
        Rendition::Thumbnail => RecoveryStatus::ThumbnailOnly,
        Rendition::Preview => RecoveryStatus::PreviewOnly,
        Rendition::Original if obj.origin.is_carved() => RecoveryStatus::CarvedDeleted,
        Rendition::Original => match &entry.hash {
            Some(h) if obj.matches_hash(h) => RecoveryStatus::RecoveredIntact,
            Some(h) => {
                warnings.push(format!(
                    "{}: content {} does not match metadata {}",
                    entry.name, obj.logical_name, h
                ));
                RecoveryStatus::RecoveredUnverified
            }
            None => RecoveryStatus::RecoveredUnverified,
        },
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("identity {0} is not a cataloged application build")]
    UncatalogedIdentity(String),
    #[error("timestamp value is not finite")]
    NonFiniteTimestamp,
    #[error("malformed {algorithm:?} digest `{hex}`")]
    BadHash {
        algorithm: HashAlgorithm,
        hex: String,
    },
    #[error("recovered object has no content")]
    EmptyObject,
}

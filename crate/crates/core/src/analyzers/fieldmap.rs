//! Column-to-field maps for every file-metadata store the analyzers read.

use crate::evidence::file_name_of;
use crate::model::{
    CloudFileEntry, ContentHash, Epoch, HashAlgorithm, Platform, Provider, Scalar, TaggedTimestamp,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Name,
    /// Path whose last component is the file name.
    NameFromPath,
    RemoteId,
    Size,
    Hash(HashAlgorithm),
    Created(Epoch),
    Modified(Epoch),
    LastViewed(Epoch),
    Favorite,
    DeletedFlag,
    /// 1 while the file is still stored in the service.
    StoredFlag,
    ThumbnailUrl,
    /// Kept verbatim under `extras`.
    Extra,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ColumnMap {
    pub column: &'static str,
    pub target: Target,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldMap {
    pub provider: Provider,
    pub platform: Platform,
    pub versions: &'static [&'static str],
    /// File name of the store.
    pub store: &'static str,
    /// Table name (may contain `{X}`), or `""` for document stores.
    pub table: &'static str,
    pub columns: &'static [ColumnMap],
}

const fn c(column: &'static str, target: Target) -> ColumnMap {
    ColumnMap { column, target }
}

use Epoch::{AppleAbsoluteSeconds as Apple, UnixSeconds as Unix};
use Target::*;

pub const FIELD_MAPS: &[FieldMap] = &[
    FieldMap {
        provider: Provider::Dropbox,
        platform: Platform::Android,
        versions: &["2.1.3", "2.2.2"],
        store: "db.db",
        table: "dropbox",
        columns: &[
            c("_data", Extra),
            c("modified", Created(Unix)),
            c("is_favorite", Favorite),
            c("parent_path", Extra),
            c("last_modified", Modified(Unix)),
            c("display_name", Name),
            c("local_hash", Hash(HashAlgorithm::Md5)),
        ],
    },
    FieldMap {
        provider: Provider::Dropbox,
        platform: Platform::Ios,
        versions: &["1.4.7"],
        store: "Dropbox.sqlite",
        table: "ZCACHEDFILE",
        columns: &[
            c("ZFAVORITE", Favorite),
            c("ZSIZE", Size),
            c("ZVIEWCOUNT", Extra),
            c("ZISTHUMBNAIL", Extra),
            c("ZLASTVIEWEDDATE", LastViewed(Apple)),
            c("ZPATH", NameFromPath),
        ],
    },
    FieldMap {
        provider: Provider::Dropbox,
        platform: Platform::Ios,
        versions: &["1.4.7"],
        store: "FavoriteFiles.plist",
        table: "",
        columns: &[
            c("path", NameFromPath),
            c("size", Size),
            c("modified", Modified(Apple)),
            c("is_deleted", DeletedFlag),
        ],
    },
    FieldMap {
        provider: Provider::Box,
        platform: Platform::Android,
        versions: &["1.6.7", "2.0.2"],
        store: "json_static_model_{EMAIL}_0",
        table: "",
        columns: &[
            c("mThumbnail", ThumbnailUrl),
            c("mFileName", Name),
            c("mSha1", Hash(HashAlgorithm::Sha1)),
            c("mUpdated", Modified(Unix)),
            c("mId", RemoteId),
            c("mSize", Size),
            c("mCreated", Created(Unix)),
            c("mShared", Extra),
        ],
    },
    FieldMap {
        provider: Provider::Box,
        platform: Platform::Ios,
        versions: &["2.7.1"],
        store: "BoxCoreDataStore.sqlite",
        table: "ZBOXBASECOREDATA",
        columns: &[
            c("ZBOXID", RemoteId),
            c("ZSIZE", Size),
            c("ZFAVORITEOBJECT", Favorite),
            c("ZUPDATED", Modified(Apple)),
            c("ZLASTDOWNLOADDATE", LastViewed(Apple)),
            c("ZCREATIONTIME", Created(Apple)),
            c("ZNAME", Name),
            c("ZSHA1", Hash(HashAlgorithm::Sha1)),
            c("ZLOCALURLSTRING", Extra),
            c("ZSTREAMINGURLSTRING", Extra),
            c("ZLOCALSHA1", Extra),
        ],
    },
    FieldMap {
        provider: Provider::SugarSync,
        platform: Platform::Android,
        versions: &["3.6", "3.6.2"],
        store: "SugarSyncDB",
        table: "rec_to_offline_file_{X}",
        columns: &[
            c("file_name", Name),
            c("file_size", Size),
            c("local_path", Extra),
            c("offline_time", Extra),
        ],
    },
    FieldMap {
        provider: Provider::SugarSync,
        platform: Platform::Ios,
        versions: &["3.0"],
        store: "Ringo.sqlite",
        table: "ZSYNCOBJECT",
        columns: &[
            c("ZNAME", Name),
            c("ZSIZE", Size),
            c("ZLOCALPATH", Extra),
            c("ZMODIFIED", Modified(Apple)),
        ],
    },
    FieldMap {
        provider: Provider::Syncplicity,
        platform: Platform::Android,
        versions: &["1.7"],
        store: "CacheDatabase.sqlite",
        table: "Files",
        columns: &[
            c("fileId", RemoteId),
            c("name", Name),
            c("length", Size),
            c("fileStatus", StoredFlag),
            c("thumbnailURL", ThumbnailUrl),
        ],
    },
    FieldMap {
        provider: Provider::Syncplicity,
        platform: Platform::Android,
        versions: &["2.1.1"],
        store: "VIRTUAL_FILE_SYSTEM.db",
        table: "Files",
        columns: &[
            c("File_ID", RemoteId),
            c("File_Name", Name),
            c("Is_Favorite", Favorite),
            c("Server_Length", Size),
            c("Local_Length", Extra),
            c("Is_Deleted", DeletedFlag),
            c("Thumbnail_URL", ThumbnailUrl),
        ],
    },
    FieldMap {
        provider: Provider::Syncplicity,
        platform: Platform::Ios,
        versions: &["1.6"],
        store: "syncplicity.sqlite",
        table: "ZFILES",
        columns: &[
            c("ZLENGTH", Size),
            c("ZFILEID", RemoteId),
            c("ZDELETED", DeletedFlag),
            c("ZFILENAME", Name),
            c("ZEXT", Extra),
            c("ZTHUMBNAILURL", ThumbnailUrl),
        ],
    },
];

/// Matches a name against a pattern whose `{...}` placeholders stand for
/// one or more characters. Case-insensitive.
pub fn pattern_matches(pattern: &str, name: &str) -> bool {
    let mut re = String::from("(?i)^");
    let mut rest = pattern;
    while let Some(open) = rest.find('{') {
        re.push_str(&regex::escape(&rest[..open]));
        re.push_str(".+");
        rest = rest[open..]
            .find('}')
            .map_or("", |close| &rest[open + close + 1..]);
    }
    re.push_str(&regex::escape(rest));
    re.push('$');
    regex::Regex::new(&re).is_ok_and(|r| r.is_match(name))
}

pub fn maps_for(provider: Provider, platform: Platform, version: &str) -> Vec<&'static FieldMap> {
    FIELD_MAPS
        .iter()
        .filter(|m| m.provider == provider && m.platform == platform)
        .filter(|m| version == crate::model::AppVersion::UNKNOWN || m.versions.contains(&version))
        .collect()
}

/// The map that applies to `table` in the store named `store_file`.
pub fn find_map<'m>(maps: &[&'m FieldMap], store_file: &str, table: &str) -> Option<&'m FieldMap> {
    maps.iter()
        .copied()
        .find(|m| pattern_matches(m.store, store_file) && pattern_matches(m.table, table))
}

fn timestamp(epoch: Epoch, v: &Scalar) -> Option<TaggedTimestamp> {
    let f = match v {
        Scalar::Text(s) => s.trim().parse().ok()?,
        other => other.as_f64()?,
    };
    TaggedTimestamp::new(epoch, f).ok()
}

fn boolean(v: &Scalar) -> Option<bool> {
    match v {
        Scalar::Text(s) => match s.trim().to_ascii_lowercase().as_str() {
            "1" | "true" | "yes" => Some(true),
            "0" | "false" | "no" => Some(false),
            _ => None,
        },
        other => other.as_bool(),
    }
}

/// Builds an entry from one record. Values that cannot be interpreted as
/// their target type, and columns the map does not know, go to `extras`.
/// Returns `None` when the record has no usable name.
pub fn apply_map<'a, I>(
    map: &FieldMap,
    record: I,
    source: &str,
    warnings: &mut Vec<String>,
) -> Option<CloudFileEntry>
where
    I: IntoIterator<Item = (&'a str, Scalar)>,
{
    let mut e = CloudFileEntry::default();
    let mut name = None;
    for (col, value) in record {
        if value.is_null() {
            continue;
        }
        let target = map
            .columns
            .iter()
            .find(|cm| cm.column.eq_ignore_ascii_case(col))
            .map(|cm| cm.target)
            .unwrap_or(Extra);
        let ok = match target {
            Name => value
                .as_str()
                .filter(|s| !s.is_empty())
                .map(|s| name = Some(s.to_string()))
                .is_some(),
            NameFromPath => value
                .as_str()
                .map(|s| file_name_of(s.trim_end_matches('/')))
                .filter(|s| !s.is_empty())
                .map(|s| name = Some(s.to_string()))
                .is_some(),
            RemoteId => {
                let id = match &value {
                    Scalar::Integer(i) => Some(i.to_string()),
                    Scalar::Real(r) if r.fract() == 0.0 => Some(format!("{}", *r as i64)),
                    Scalar::Text(s) if !s.is_empty() => Some(s.clone()),
                    _ => None,
                };
                id.map(|id| e.remote_id = Some(id)).is_some()
            }
            Size => match &value {
                Scalar::Text(s) => s.trim().parse().ok(),
                other => other.as_i64().and_then(|i| u64::try_from(i).ok()),
            }
            .map(|s| e.size_bytes = Some(s))
            .is_some(),
            Hash(alg) => match value.as_str().map(|h| ContentHash::new(alg, h)) {
                Some(Ok(h)) => {
                    e.hash = Some(h);
                    true
                }
                _ => {
                    warnings.push(format!("{source}: {col} is not a valid {alg:?} digest"));
                    false
                }
            },
            Created(ep) => timestamp(ep, &value).map(|t| e.created = Some(t)).is_some(),
            Modified(ep) => timestamp(ep, &value)
                .map(|t| e.modified = Some(t))
                .is_some(),
            LastViewed(ep) => timestamp(ep, &value)
                .map(|t| e.last_viewed = Some(t))
                .is_some(),
            Favorite => boolean(&value).map(|b| e.favorite = Some(b)).is_some(),
            DeletedFlag => boolean(&value).map(|b| e.deleted_flag = Some(b)).is_some(),
            StoredFlag => boolean(&value).map(|b| e.deleted_flag = Some(!b)).is_some(),
            ThumbnailUrl => value
                .as_str()
                .filter(|s| !s.is_empty())
                .map(|s| e.thumbnail_url = Some(s.to_string()))
                .is_some(),
            Extra => false,
        };
        if !ok {
            e.extras.insert(col.to_string(), value);
        }
    }
    e.name = name?;
    e.source_artifact = Some(source.to_string());
    Some(e)
}

//! Per-build placement of dataset content, metadata stores, preferences and
//! logs, and of the residue left in unallocated space.

use cloudsift::locator::ArtifactRole::{self, *};
use cloudsift::model::{AppIdentity, Platform, Provider, Rendition, APPLE_EPOCH_OFFSET};
use plist::{Dictionary, Value};
use rand::Rng;

use crate::formats;
use crate::scenario::{Layout, Tree, Tree::Internal, Tree::Sd};
use crate::stores::{
    android_metadata, p, plist_binary, plist_xml, shared_prefs, sqlite, Pref, Table,
};
use crate::GenError;

pub const EMAIL: &str = "j.examiner@example.com";
pub const BOX_TOKEN: &str = "u5es7xli4xejrh89kr6xu14tks6grjn3";
const DROPBOX_UID: &str = "48213377";
const SUGARSYNC_UID: &str = "9823614";
const SYNCPLICITY_UID: &str = "5310744";

const VIEWED: [usize; 5] = [1, 5, 9, 13, 17];
const OFFLINE: [usize; 5] = [2, 6, 10, 14, 18];
const DELETED: [usize; 5] = [4, 8, 12, 16, 20];
const IMAGES: [usize; 4] = [1, 2, 3, 4];

fn touched() -> Vec<usize> {
    let mut v: Vec<usize> = VIEWED
        .iter()
        .chain(&OFFLINE)
        .chain(&DELETED)
        .copied()
        .collect();
    v.sort();
    v
}

fn created(n: usize) -> i64 {
    1_334_914_763 + 2 * n as i64
}

fn updated(n: usize) -> i64 {
    created(n) + 2
}

fn viewed_at(n: usize) -> i64 {
    1_335_445_000 + 97 * n as i64
}

fn apple(unix: i64) -> f64 {
    unix as f64 - APPLE_EPOCH_OFFSET
}

fn box_id(n: usize) -> i64 {
    2_072_716_496 + n as i64
}

fn syncplicity_id(n: usize) -> i64 {
    70_312_400 + n as i64
}

fn syncplicity_version(n: usize) -> i64 {
    145_789_432 + n as i64
}

pub fn populate(l: &mut Layout, id: &AppIdentity) -> Result<(), GenError> {
    match (id.provider, id.platform, id.version.as_str()) {
        (Provider::Dropbox, Platform::Android, v) => dropbox_android(l, v),
        (Provider::Dropbox, Platform::Ios, _) => dropbox_ios(l),
        (Provider::Box, Platform::Android, "1.6.7") => box_167(l),
        (Provider::Box, Platform::Android, _) => box_202(l),
        (Provider::Box, Platform::Ios, _) => box_ios(l),
        (Provider::SugarSync, Platform::Android, v) => sugarsync_android(l, v),
        (Provider::SugarSync, Platform::Ios, _) => sugarsync_ios(l),
        (Provider::Syncplicity, Platform::Android, "1.7") => syncplicity_17(l),
        (Provider::Syncplicity, Platform::Android, _) => syncplicity_211(l),
        (Provider::Syncplicity, Platform::Ios, _) => syncplicity_ios(l),
    }
}

/// Places originals `ns` under `dir`, or sends them to residue when the
/// cache has been cleared and `volatile` is set.
fn originals(
    l: &mut Layout,
    t: Tree,
    dir: &str,
    ns: &[usize],
    volatile: bool,
    name: impl Fn(usize, &str) -> String,
) {
    for &n in ns {
        let f = l.file(n);
        let bytes = l.original(n);
        if volatile && l.cleared {
            l.residue(&f.name, Rendition::Original, bytes);
        } else {
            l.put(t, &format!("{dir}/{}", name(n, &f.name)), bytes);
        }
    }
}

fn thumbnails(
    l: &mut Layout,
    t: Tree,
    dir: &str,
    ns: &[usize],
    volatile: bool,
    name: impl Fn(usize, &str) -> String,
) {
    for &n in ns {
        let f = l.file(n);
        let bytes = l.thumb(n);
        if volatile && l.cleared {
            l.residue(&f.name, Rendition::Thumbnail, bytes);
        } else {
            l.put(t, &format!("{dir}/{}", name(n, &f.name)), bytes);
        }
    }
}

fn to_residue(l: &mut Layout, ns: &[usize]) {
    for &n in ns {
        let name = l.file(n).name.clone();
        let bytes = l.original(n);
        l.residue(&name, Rendition::Original, bytes);
    }
}

fn plain(_: usize, name: &str) -> String {
    name.to_string()
}

fn encrypted_blobs(l: &mut Layout, t: Tree, dir: &str, count: usize) {
    if l.cleared {
        return;
    }
    for _ in 0..count {
        let name = l.hex_name(32);
        let blob = l.random_blob(2048, 8192);
        l.put(t, &format!("{dir}/{name}"), blob);
    }
}

fn put_expected(l: &mut Layout, role: ArtifactRole, t: Tree, path: &str, bytes: Vec<u8>) {
    l.put(t, path, bytes);
    l.expect(role, t, path);
}

fn log_lines(lines: &[(i64, String)]) -> Vec<u8> {
    lines
        .iter()
        .map(|(t, s)| format!("{t} {s}\n"))
        .collect::<String>()
        .into_bytes()
}

fn transaction_log(l: &Layout, version: &str) -> Vec<u8> {
    let mut lines = vec![(1_335_444_900, format!("app.start version={version}"))];
    for n in touched() {
        let f = l.file(n);
        lines.push((
            viewed_at(n),
            format!("file.view name={} size={}", f.name, f.size),
        ));
        if OFFLINE.contains(&n) {
            lines.push((viewed_at(n) + 5, format!("file.offline name={}", f.name)));
        }
    }
    log_lines(&lines)
}

fn dropbox_android(l: &mut Layout, version: &str) -> Result<(), GenError> {
    let sd = "/Android/data/com.dropbox.android";
    let thumbs = format!("{sd}/cache/thumbs");
    l.expect(ThumbnailDir, Sd, &thumbs);
    thumbnails(l, Sd, &thumbs, &IMAGES, false, plain);
    let scratch = format!("{sd}/files/scratch");
    l.expect(CacheDir, Sd, &scratch);
    originals(l, Sd, &scratch, &OFFLINE, false, plain);
    originals(l, Sd, &scratch, &[13, 17], true, plain);
    to_residue(l, &[16, 20]);

    let local: Vec<usize> = if l.cleared {
        OFFLINE.to_vec()
    } else {
        [&OFFLINE[..], &[13, 17]].concat()
    };
    let mut t = Table::new(
        "CREATE TABLE dropbox (_id INTEGER PRIMARY KEY AUTOINCREMENT, _data TEXT, modified INTEGER, \
         bytes INTEGER, is_dir INTEGER, is_favorite INTEGER, parent_path TEXT, path TEXT, \
         last_modified INTEGER, display_name TEXT, local_hash TEXT)",
        "INSERT INTO dropbox (_data, modified, bytes, is_dir, is_favorite, parent_path, path, \
         last_modified, display_name, local_hash) VALUES (?1, ?2, ?3, 0, ?4, '/', ?5, ?6, ?7, ?8)",
    );
    for f in &l.data.files {
        let n = f.number();
        if DELETED.contains(&n) {
            continue;
        }
        let data: Option<String> = local
            .contains(&n)
            .then(|| format!("/mnt/sdcard{scratch}/{}", f.name));
        t.row(vec![
            p(data),
            p(created(n)),
            p(f.size as i64),
            p(OFFLINE.contains(&n) as i64),
            p(format!("/{}", f.name)),
            p(f.manipulation.viewed().then(|| viewed_at(n))),
            p(f.name.clone()),
            p(f.md5.clone()),
        ]);
    }
    let db = sqlite(&[android_metadata(), t])?;
    put_expected(
        l,
        MetadataStore,
        Internal,
        "/data/data/com.dropbox.android/databases/db.db",
        db,
    );

    let mut prefs = Table::new(
        "CREATE TABLE DropboxAccountPrefs (_id INTEGER PRIMARY KEY, pref_key TEXT UNIQUE, pref_value TEXT)",
        "INSERT INTO DropboxAccountPrefs (pref_key, pref_value) VALUES (?1, ?2)",
    );
    for (k, v) in [
        ("ACCOUNT_EMAIL", EMAIL),
        ("USER_ID", DROPBOX_UID),
        ("DISPLAY_NAME", "Jo Examiner"),
    ] {
        prefs.row(vec![p(k), p(v)]);
    }
    let prefs = sqlite(&[android_metadata(), prefs])?;
    put_expected(
        l,
        PrefsFile,
        Internal,
        "/data/data/com.dropbox.android/databases/prefs.db",
        prefs,
    );
    let log = transaction_log(l, version);
    put_expected(
        l,
        LogFile,
        Internal,
        "/data/data/com.dropbox.android/files/log.txt",
        log,
    );
    Ok(())
}

const ANALYTICS_LOG: &str = r#"{ "retry":0, "favorite":false, "extension":"pdf", "id":23, "cached":false, "ts":"1335445641.29", "event":"file.view.start", "size":1695706 }
{ "id":23, "ts":"1335445641.31", "size":1695706, "event":"download.start", "extension":"pdf", "connection":"wifi" }
{ "ts":"1335445641.84", "screen":"DocumentViewController", "event":"screen.view" }
{ "id":23, "ts":"1335445657.75", "size":1695706, "event":"download.success", "extension":"pdf" }
{ "id":23, "event":"file.view.success", "ts":"1335445659.92" }
{ "ts":"1335445669.71", "screen":"SearchableFolderListController", "event":"screen.view" }
{ "ts":"1335445670.04", "cached":true, "path_hash":912, "event":"metadata.load.start" }
{ "path_hash":912, "event":"metadata.load.unchanged", "ts":"1335445673.07" }
"#;

fn core_data_tables(entity: &str) -> [Table; 2] {
    let mut pk = Table::new(
        "CREATE TABLE Z_PRIMARYKEY (Z_ENT INTEGER PRIMARY KEY, Z_NAME VARCHAR, Z_SUPER INTEGER, Z_MAX INTEGER)",
        "INSERT INTO Z_PRIMARYKEY VALUES (?1, ?2, 0, ?3)",
    );
    pk.row(vec![p(1), p(entity.to_string()), p(20)]);
    let mut meta = Table::new(
        "CREATE TABLE Z_METADATA (Z_VERSION INTEGER PRIMARY KEY, Z_UUID VARCHAR(255), Z_PLIST BLOB)",
        "INSERT INTO Z_METADATA VALUES (1, ?1, ?2)",
    );
    meta.row(vec![
        p("5A1C2E77-0B3D-4F21-9C44-1D7E2B9F0A63"),
        p(b"bplist00".to_vec()),
    ]);
    [pk, meta]
}

fn dropbox_ios(l: &mut Layout) -> Result<(), GenError> {
    let cache = l.at("/Library/Caches/Dropbox");
    l.expect(CacheDir, Internal, &cache);
    if !l.cleared {
        thumbnails(l, Internal, &cache, &[1, 2, 3], false, |_, n| {
            format!("thumb_{n}")
        });
    }
    originals(l, Internal, &cache, &OFFLINE, false, plain);
    let cached: &[usize] = if l.cleared { &[] } else { &[13, 17] };
    originals(l, Internal, &cache, cached, false, plain);

    let mut rows: Vec<usize> = [&OFFLINE[..], cached].concat();
    rows.sort();
    let mut t = Table::new(
        "CREATE TABLE ZCACHEDFILE (Z_PK INTEGER PRIMARY KEY, Z_ENT INTEGER, Z_OPT INTEGER, ZFAVORITE INTEGER, \
         ZISTHUMBNAIL INTEGER, ZVIEWCOUNT INTEGER, ZSIZE INTEGER, ZLASTVIEWEDDATE TIMESTAMP, ZPATH VARCHAR, \
         ZREVISION VARCHAR)",
        "INSERT INTO ZCACHEDFILE VALUES (?1, 1, 1, ?2, 0, ?3, ?4, ?5, ?6, ?7)",
    );
    for (pk, &n) in rows.iter().enumerate() {
        let f = l.file(n);
        t.row(vec![
            p(pk as i64 + 1),
            p(OFFLINE.contains(&n) as i64),
            p(1 + (n % 3) as i64),
            p(f.size as i64),
            p(apple(viewed_at(n))),
            p(format!("/{}", f.name)),
            p(format!("{:x}", 0x1a2b_0000 + n)),
        ]);
    }
    let [pk, meta] = core_data_tables("CachedFile");
    let db = sqlite(&[t, pk, meta])?;
    let path = l.at("/Documents/Dropbox.sqlite");
    put_expected(l, MetadataStore, Internal, &path, db);

    let mut prefs = Dictionary::new();
    prefs.insert("DBAccountEmail".into(), Value::String(EMAIL.into()));
    prefs.insert("DBUserID".into(), Value::String(DROPBOX_UID.into()));
    prefs.insert("DBHasLinkedAccount".into(), Value::Boolean(true));
    prefs.insert(
        "DBFavoritePaths".into(),
        Value::Array(
            OFFLINE
                .iter()
                .map(|&n| Value::String(format!("/{}", l.file(n).name)))
                .collect(),
        ),
    );
    let path = l.at("/Library/Preferences/com.getdropbox.Dropbox.plist");
    put_expected(
        l,
        PrefsFile,
        Internal,
        &path,
        plist_xml(&Value::Dictionary(prefs))?,
    );

    let favorites = OFFLINE
        .iter()
        .map(|&n| {
            let f = l.file(n);
            let mut d = Dictionary::new();
            d.insert("path".into(), Value::String(format!("/{}", f.name)));
            d.insert("size".into(), Value::Integer((f.size as i64).into()));
            d.insert("modified".into(), Value::Real(apple(updated(n))));
            d.insert("is_deleted".into(), Value::Boolean(false));
            Value::Dictionary(d)
        })
        .collect();
    let path = l.at("/Library/Caches/FavoriteFiles.plist");
    put_expected(
        l,
        MetadataStore,
        Internal,
        &path,
        plist_binary(&Value::Array(favorites))?,
    );

    let path = l.at("/Library/Caches/Analytics.log");
    put_expected(
        l,
        LogFile,
        Internal,
        &path,
        ANALYTICS_LOG.as_bytes().to_vec(),
    );
    let run = transaction_log(l, "1.4.7");
    let path = l.at("/tmp/run.log");
    put_expected(l, LogFile, Internal, &path, run);
    Ok(())
}

fn box_model(l: &Layout) -> Vec<u8> {
    let records: Vec<serde_json::Value> = l
        .data
        .files
        .iter()
        .map(|f| {
            let n = f.number();
            let key = &f.md5;
            serde_json::json!({
                "mFileName": f.name,
                "mThumbnail": format!("https://mobile-api.box.com/api/data/bf1008/public/120120222/sm20/{key}.gif"),
                "mSmallThumbnail": format!("https://mobile-api.box.com/api/data/bf1008/public/120120222/sm20/{key}.gif"),
                "mLargeThumbnail": format!("https://mobile-api.box.com/api/data/bf1008/public/120120222/larg20/{key}.jpg"),
                "mPreviewThumbnail": format!("https://mobile-api.box.com/api/data/bf1008/public/120120222/pre20/{key}.jpg"),
                "mPermissions": "gdcenopstuvh",
                "mSha1": f.sha1,
                "mUpdated": updated(n),
                "mId": box_id(n),
                "mSize": f.size,
                "mFolderId": 0,
                "mCreated": created(n),
                "mCommentCount": 0,
                "mShared": false,
            })
        })
        .collect();
    serde_json::to_vec(&serde_json::json!({ "mFiles": records, "mUserEmail": EMAIL }))
        .expect("json")
}

fn box_prefs(l: &mut Layout) {
    let prefs = shared_prefs(&[
        Pref::Str("authToken", BOX_TOKEN.to_string()),
        Pref::Str("userEmail", EMAIL.to_string()),
        Pref::Long("lastLogin", 1_334_914_700),
    ]);
    put_expected(
        l,
        PrefsFile,
        Internal,
        "/data/data/com.box.android/shared_prefs/myPreference.xml",
        prefs,
    );
    let model = box_model(l);
    let path = format!("/data/data/com.box.android/files/json_static_model_{EMAIL}_0");
    put_expected(l, MetadataStore, Internal, &path, model);
}

fn box_167(l: &mut Layout) -> Result<(), GenError> {
    let offline = format!("/Box/{EMAIL}");
    l.expect(OfflineDir, Sd, &offline);
    originals(l, Sd, &offline, &OFFLINE, true, plain);
    let filecache = "/Android/data/com.box.android/cache/filecache";
    l.expect(CacheDir, Sd, filecache);
    let ids = |n: usize, name: &str| format!("{}_{name}", box_id(n));
    for n in touched() {
        let f = l.file(n);
        let bytes = l.original(n);
        if l.cleared {
            // The offline copy is already in residue.
            if !OFFLINE.contains(&n) {
                l.residue(&f.name, Rendition::Original, bytes);
            }
        } else {
            l.put(Sd, &format!("{filecache}/{}", ids(n, &f.name)), bytes);
        }
    }
    let thumbs = "/Android/data/com.box.android/cache/tempfiles/box_tmp_images";
    l.expect(ThumbnailDir, Sd, thumbs);
    thumbnails(l, Sd, thumbs, &IMAGES, false, |n, _| {
        format!("{}.jpg", box_id(n))
    });

    box_prefs(l);
    let downloaded: Vec<Pref> = OFFLINE
        .iter()
        .map(|&n| Pref::Bool(box_id(n).to_string(), true))
        .collect();
    put_expected(
        l,
        PrefsFile,
        Internal,
        "/data/data/com.box.android/shared_prefs/Downloaded_Files.xml",
        shared_prefs(&downloaded),
    );
    Ok(())
}

fn box_202(l: &mut Layout) -> Result<(), GenError> {
    for d in ["dl_cache", "dl_offline", "previews"] {
        let dir = format!("/Android/data/com.box.android/cache/{d}");
        l.expect(EncryptedCacheDir, Sd, &dir);
        encrypted_blobs(l, Sd, &dir, 5);
    }
    let thumbs = "/data/data/com.box.android/cache/tempfiles/box_tmp_images";
    l.expect(ThumbnailDir, Internal, thumbs);
    thumbnails(l, Internal, thumbs, &IMAGES, false, |n, _| {
        format!("{}.jpg", box_id(n))
    });
    let working = "/data/data/com.box.android/cache/working";
    l.expect(CacheDir, Internal, working);
    if l.cleared {
        to_residue(l, &[8, 9, 10, 12]);
    } else {
        originals(l, Internal, working, &[5, 6, 8, 9, 10, 12], false, plain);
    }
    let previews = "/data/data/com.box.android/files/previews";
    l.expect(PreviewDir, Internal, previews);
    let paged = [1, 2, 4, 13, 14, 16, 17, 18, 20];
    if !l.cleared {
        for n in paged {
            let payload = l.rng.gen_range(1500..6000);
            let png = formats::png(payload, &mut l.rng);
            l.put(
                Internal,
                &format!("{previews}/{}_page1.png", box_id(n)),
                png,
            );
        }
    }

    box_prefs(l);
    let pages: Vec<Pref> = paged
        .iter()
        .map(|&n| Pref::Int(box_id(n).to_string(), 1 + (n % 4) as i64))
        .collect();
    put_expected(
        l,
        PrefsFile,
        Internal,
        "/data/data/com.box.android/shared_prefs/Preview_Num_Pages.xml",
        shared_prefs(&pages),
    );
    let offline: Vec<Pref> = OFFLINE
        .iter()
        .map(|&n| Pref::Bool(box_id(n).to_string(), true))
        .collect();
    put_expected(
        l,
        PrefsFile,
        Internal,
        "/data/data/com.box.android/shared_prefs/offlineFileSharedPreferences.xml",
        shared_prefs(&offline),
    );
    Ok(())
}

fn box_ios(l: &mut Layout) -> Result<(), GenError> {
    let saved = l.at("/Documents/SavedFiles");
    l.expect(OfflineDir, Internal, &saved);
    originals(l, Internal, &saved, &OFFLINE, false, plain);
    let thumbs = l.at("/Library/Caches/Thumbnails");
    l.expect(ThumbnailDir, Internal, &thumbs);
    thumbnails(l, Internal, &thumbs, &IMAGES, false, |n, _| {
        format!("{}.jpg", box_id(n))
    });

    let mut t = Table::new(
        "CREATE TABLE ZBOXBASECOREDATA (Z_PK INTEGER PRIMARY KEY, Z_ENT INTEGER, Z_OPT INTEGER, ZBOXID VARCHAR, \
         ZSIZE INTEGER, ZFAVORITEOBJECT INTEGER, ZUPDATED TIMESTAMP, ZLASTDOWNLOADDATE TIMESTAMP, \
         ZCREATIONTIME TIMESTAMP, ZNAME VARCHAR, ZSHA1 VARCHAR, ZLOCALURLSTRING VARCHAR, \
         ZSTREAMINGURLSTRING VARCHAR, ZLOCALSHA1 VARCHAR)",
        "INSERT INTO ZBOXBASECOREDATA VALUES (?1, 2, 1, ?2, ?3, ?4, ?5, ?6, ?7, ?8, ?9, ?10, ?11, ?12)",
    );
    for f in &l.data.files {
        let n = f.number();
        let offline = OFFLINE.contains(&n);
        t.row(vec![
            p(n as i64),
            p(box_id(n).to_string()),
            p(f.size as i64),
            p(offline as i64),
            p(apple(updated(n))),
            p(offline.then(|| apple(viewed_at(n)))),
            p(apple(created(n))),
            p(f.name.clone()),
            p(f.sha1.clone()),
            p(offline.then(|| format!("Documents/SavedFiles/{}", f.name))),
            p(format!(
                "https://www.box.net/api/1.0/download/{BOX_TOKEN}/{}",
                box_id(n)
            )),
            p(offline.then(|| f.sha1.clone())),
        ]);
    }
    let mut user = Table::new(
        "CREATE TABLE ZBOXUSER (Z_PK INTEGER PRIMARY KEY, ZUSERNAME VARCHAR, ZEMAIL VARCHAR, ZAUTHTOKEN VARCHAR)",
        "INSERT INTO ZBOXUSER VALUES (1, ?1, ?2, ?3)",
    );
    user.row(vec![p("Jo Examiner"), p(EMAIL), p(BOX_TOKEN)]);
    let [_, meta] = core_data_tables("BoxBaseCoreData");
    let db = sqlite(&[t, user, meta])?;
    let path = l.at("/Documents/BoxCoreDataStore.sqlite");
    put_expected(l, MetadataStore, Internal, &path, db);
    Ok(())
}

fn sugarsync_android(l: &mut Layout, version: &str) -> Result<(), GenError> {
    l.expect(CacheDir, Sd, "/.sugarsync");
    originals(l, Sd, "/.sugarsync", &[13, 14, 16], false, plain);
    let http = "/.sugarsync/.httpfilecache";
    l.expect(CacheDir, Sd, http);
    thumbnails(l, Sd, http, &IMAGES, true, |_, n| format!("thumb_{n}"));
    let cached = [1, 2, 4, 13, 16, 17, 20];
    if l.cleared {
        to_residue(l, &[1, 4, 17, 20]);
    } else {
        originals(l, Sd, http, &cached, false, plain);
    }
    l.expect(OfflineDir, Sd, "/MySugarSyncFolders");
    originals(l, Sd, "/MySugarSyncFolders", &OFFLINE, false, plain);

    let base = "/data/data/com.sharpcast.sugarsync";
    let appdata = format!(
        "email={EMAIL}\nuserid={SUGARSYNC_UID}\npassword_hash=5f4dcc3b5aa765d61d8327deb882cf99\nclient_version={version}\n"
    );
    put_expected(
        l,
        PrefsFile,
        Internal,
        &format!("{base}/app_SugarSync/SugarSync/sc_appdata"),
        appdata.into_bytes(),
    );
    let log = transaction_log(l, version);
    put_expected(
        l,
        LogFile,
        Internal,
        &format!("{base}/app_SugarSync/SugarSync/log/sugarsync.log"),
        log,
    );
    let mut t = Table::new(
        &format!(
            "CREATE TABLE rec_to_offline_file_{SUGARSYNC_UID} (_id INTEGER PRIMARY KEY, file_name TEXT, \
             file_size INTEGER, local_path TEXT, offline_time INTEGER)"
        ),
        &format!(
            "INSERT INTO rec_to_offline_file_{SUGARSYNC_UID} (file_name, file_size, local_path, offline_time) \
             VALUES (?1, ?2, ?3, ?4)"
        ),
    );
    for &n in &OFFLINE {
        let f = l.file(n);
        t.row(vec![
            p(f.name.clone()),
            p(f.size as i64),
            p(format!("/mnt/sdcard/MySugarSyncFolders/{}", f.name)),
            p(viewed_at(n) + 5),
        ]);
    }
    let db = sqlite(&[android_metadata(), t])?;
    put_expected(
        l,
        MetadataStore,
        Internal,
        &format!("{base}/databases/SugarSyncDB"),
        db,
    );
    Ok(())
}

fn sugarsync_ios(l: &mut Layout) -> Result<(), GenError> {
    let http = l.at("/tmp/http_cache");
    l.expect(CacheDir, Internal, &http);
    if !l.cleared {
        originals(
            l,
            Internal,
            &http,
            &[1, 2, 4, 9, 10, 12, 13, 14, 16, 17, 18, 20],
            false,
            plain,
        );
    }
    let cache = l.at("/tmp/cache");
    l.expect(CacheDir, Internal, &cache);
    originals(l, Internal, &cache, &[5, 6, 8], false, plain);
    let offline = l.at("/Documents/MyiPhone");
    l.expect(OfflineDir, Internal, &offline);
    originals(l, Internal, &offline, &OFFLINE, false, plain);

    let appdata = format!("email={EMAIL}\nuserid={SUGARSYNC_UID}\n");
    let path = l.at("/Documents/ringo.appdata");
    put_expected(l, PrefsFile, Internal, &path, appdata.into_bytes());
    let mut t = Table::new(
        "CREATE TABLE ZSYNCOBJECT (Z_PK INTEGER PRIMARY KEY, Z_ENT INTEGER, Z_OPT INTEGER, ZNAME VARCHAR, \
         ZSIZE INTEGER, ZLOCALPATH VARCHAR, ZMODIFIED TIMESTAMP)",
        "INSERT INTO ZSYNCOBJECT VALUES (?1, 1, 1, ?2, ?3, ?4, ?5)",
    );
    for (pk, &n) in OFFLINE.iter().enumerate() {
        let f = l.file(n);
        t.row(vec![
            p(pk as i64 + 1),
            p(f.name.clone()),
            p(f.size as i64),
            p(format!("Documents/MyiPhone/{}", f.name)),
            p(apple(updated(n))),
        ]);
    }
    let [pk, meta] = core_data_tables("SyncObject");
    let db = sqlite(&[t, pk, meta])?;
    let path = l.at("/Documents/Ringo.sqlite");
    put_expected(l, MetadataStore, Internal, &path, db);
    Ok(())
}

fn syncplicity_prefs(l: &mut Layout, package: &str) {
    let dir = format!("/data/data/{package}/shared_prefs");
    let auth = shared_prefs(&[
        Pref::Str("email", EMAIL.to_string()),
        Pref::Str("user_id", SYNCPLICITY_UID.to_string()),
        Pref::Long("last_login", 1_334_914_700),
    ]);
    put_expected(
        l,
        PrefsFile,
        Internal,
        &format!("{dir}/auth_prefs.xml"),
        auth,
    );
    for (k, n) in touched().into_iter().enumerate() {
        let f = l.file(n);
        let doc = shared_prefs(&[
            Pref::Long(
                "FILE_CACHE_PREFERENCES_LAST_DECRYPTED_FILE_VERSION_ID",
                syncplicity_version(n),
            ),
            Pref::Str(
                "FILE_CACHE_PREFERENCES_LAST_DECRYPTED_FILE_NAME",
                f.name.clone(),
            ),
        ]);
        put_expected(
            l,
            PrefsFile,
            Internal,
            &format!("{dir}/file_cache_preferences{k}.deleted.xml"),
            doc,
        );
    }
}

fn thumbnail_url(n: usize) -> String {
    format!("https://my.syncplicity.com/thumbnail/{}", syncplicity_id(n))
}

fn syncplicity_17(l: &mut Layout) -> Result<(), GenError> {
    let sd = "/Android/data/com.syncplicity.android/cache";
    let thumbs = format!("{sd}/cacheifu/image_cache");
    l.expect(ThumbnailDir, Sd, &thumbs);
    thumbnails(l, Sd, &thumbs, &IMAGES, true, |n, _| {
        format!("{}.jpg", syncplicity_id(n))
    });
    l.expect(OfflineDir, Sd, "/Syncplicity");
    originals(l, Sd, "/Syncplicity", &OFFLINE, false, plain);
    let enc = format!("{sd}/private_syncp_file_cache_v3/encrypted/{SYNCPLICITY_UID}");
    l.expect(EncryptedCacheDir, Sd, &enc);
    encrypted_blobs(l, Sd, &enc, 15);
    to_residue(l, &[17, 20]);
    l.expect(
        CacheDir,
        Internal,
        "/data/data/com.syncplicity.android/files",
    );

    let mut t = Table::new(
        "CREATE TABLE Files (_id INTEGER PRIMARY KEY, fileId INTEGER, name TEXT, length INTEGER, \
         fileStatus INTEGER, thumbnailURL TEXT, folderId INTEGER)",
        "INSERT INTO Files (fileId, name, length, fileStatus, thumbnailURL, folderId) VALUES (?1, ?2, ?3, ?4, ?5, 1)",
    );
    for f in &l.data.files {
        let n = f.number();
        t.row(vec![
            p(syncplicity_id(n)),
            p(f.name.clone()),
            p(f.size as i64),
            p(!DELETED.contains(&n) as i64),
            p((f.file_type == crate::dataset::FileType::Jpeg).then(|| thumbnail_url(n))),
        ]);
    }
    let db = sqlite(&[android_metadata(), t])?;
    put_expected(
        l,
        MetadataStore,
        Internal,
        "/data/data/com.syncplicity.android/databases/CacheDatabase.sqlite",
        db,
    );
    syncplicity_prefs(l, "com.syncplicity");
    Ok(())
}

fn syncplicity_211(l: &mut Layout) -> Result<(), GenError> {
    let sd = "/Android/data/com.syncplicity.android";
    let thumbs = format!("{sd}/cache/cachefu/image_cache");
    l.expect(ThumbnailDir, Sd, &thumbs);
    thumbnails(l, Sd, &thumbs, &IMAGES, true, |n, _| {
        format!("{}.jpg", syncplicity_id(n))
    });
    let enc = format!("{sd}/encrypted_storage");
    l.expect(EncryptedCacheDir, Sd, &enc);
    encrypted_blobs(l, Sd, &enc, 15);
    let dec = format!("{sd}/temporary_decrypted_storage");
    l.expect(CacheDir, Sd, &dec);
    originals(l, Sd, &dec, &OFFLINE, false, plain);
    originals(l, Sd, &dec, &[1, 4, 5, 8, 9, 12, 13, 16, 17], true, plain);

    let base = "/data/data/com.syncplicity.android";
    let log = transaction_log(l, "2.1.1");
    put_expected(
        l,
        LogFile,
        Internal,
        &format!("{base}/app_log_syncplicity/00000000000000000000.log.gz.tmp"),
        log,
    );
    let mut t = Table::new(
        "CREATE TABLE Files (File_ID INTEGER PRIMARY KEY, File_Name TEXT, Is_Favorite INTEGER, \
         Server_Length INTEGER, Local_Length INTEGER, Is_Deleted INTEGER, Thumbnail_URL TEXT)",
        "INSERT INTO Files VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7)",
    );
    for f in &l.data.files {
        let n = f.number();
        let offline = OFFLINE.contains(&n);
        t.row(vec![
            p(syncplicity_id(n)),
            p(f.name.clone()),
            p(offline as i64),
            p(f.size as i64),
            p(if f.manipulation.viewed() {
                f.size as i64
            } else {
                0
            }),
            p(DELETED.contains(&n) as i64),
            p((f.file_type == crate::dataset::FileType::Jpeg).then(|| thumbnail_url(n))),
        ]);
    }
    let mut sync = Table::new(
        "CREATE TABLE Files_and_Folders_to_Synchronize (_id INTEGER PRIMARY KEY, Path TEXT, Sync_Type INTEGER)",
        "INSERT INTO Files_and_Folders_to_Synchronize (Path, Sync_Type) VALUES (?1, 1)",
    );
    for &n in &OFFLINE {
        sync.row(vec![p(format!("/My Syncplicity/{}", l.file(n).name))]);
    }
    let db = sqlite(&[android_metadata(), t, sync])?;
    put_expected(
        l,
        MetadataStore,
        Internal,
        &format!("{base}/databases/VIRTUAL_FILE_SYSTEM.db"),
        db,
    );
    syncplicity_prefs(l, "com.syncplicity.android");
    Ok(())
}

fn syncplicity_ios(l: &mut Layout) -> Result<(), GenError> {
    let docs = l.at("/Documents");
    l.expect(CacheDir, Internal, &docs);
    if !l.cleared {
        originals(
            l,
            Internal,
            &docs,
            &[1, 2, 4, 5, 6, 8, 9, 10, 13, 14, 16, 17, 18, 20],
            false,
            plain,
        );
    }
    let mut t = Table::new(
        "CREATE TABLE ZFILES (Z_PK INTEGER PRIMARY KEY, Z_ENT INTEGER, Z_OPT INTEGER, ZLENGTH INTEGER, \
         ZFILEID INTEGER, ZDELETED INTEGER, ZFILENAME VARCHAR, ZEXT VARCHAR, ZTHUMBNAILURL VARCHAR)",
        "INSERT INTO ZFILES VALUES (?1, 1, 1, ?2, ?3, ?4, ?5, ?6, ?7)",
    );
    for f in &l.data.files {
        let n = f.number();
        t.row(vec![
            p(n as i64),
            p(f.size as i64),
            p(syncplicity_id(n)),
            p(DELETED.contains(&n) as i64),
            p(f.name.clone()),
            p(f.file_type.extension()),
            p((f.file_type == crate::dataset::FileType::Jpeg).then(|| thumbnail_url(n))),
        ]);
    }
    let [pk, meta] = core_data_tables("Files");
    let db = sqlite(&[t, pk, meta])?;
    let path = l.at("/Documents/syncplicity.sqlite");
    put_expected(l, MetadataStore, Internal, &path, db);

    let mut prefs = Dictionary::new();
    prefs.insert("FirstName".into(), Value::String("Jo".into()));
    prefs.insert("LastName".into(), Value::String("Examiner".into()));
    prefs.insert("AccountType".into(), Value::String("Personal".into()));
    prefs.insert("Email".into(), Value::String(EMAIL.into()));
    let path = l.at("/Library/Preferences/com.syncplicity.ios/syncplicity.plist");
    put_expected(
        l,
        PrefsFile,
        Internal,
        &path,
        plist_xml(&Value::Dictionary(prefs))?,
    );
    let log = transaction_log(l, "1.6");
    let path = l.at("/Library/Caches/syncplicity_0.log");
    put_expected(l, LogFile, Internal, &path, log);
    Ok(())
}

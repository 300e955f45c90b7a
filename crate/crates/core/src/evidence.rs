//! Read-only evidence inputs: extracted file trees and flat raw images.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{Read, Seek, SeekFrom};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use sha1::{Digest, Sha1};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvidenceError {
    #[error("cannot open evidence source {path}: {source}")]
    Open {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed TAR archive {path}: {source}")]
    Tar {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("path not found in tree {tree}: {path}")]
    NotFound { tree: String, path: String },
    #[error("read failed for {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone)]
enum Location {
    Disk(PathBuf),
    TarMember { archive: Arc<PathBuf>, offset: u64 },
    Memory(Arc<[u8]>),
}

#[derive(Debug, Clone)]
struct FileRecord {
    size: u64,
    location: Location,
}

/// Normalizes a relative or absolute path to `/`-separated form with a
/// single leading slash and no `.` or empty components.
pub fn normalize_path(p: &str) -> String {
    let mut out = String::new();
    for comp in p.split(['/', '\\']) {
        if comp.is_empty() || comp == "." {
            continue;
        }
        out.push('/');
        out.push_str(comp);
    }
    if out.is_empty() {
        out.push('/');
    }
    out
}

/// Parent directory of a normalized path (`/` for top-level entries).
pub fn parent_of(path: &str) -> &str {
    match path.rfind('/') {
        Some(0) | None => "/",
        Some(i) => &path[..i],
    }
}

pub fn file_name_of(path: &str) -> &str {
    path.rsplit('/').next().unwrap_or(path)
}

/// An extracted file hierarchy, opened read-only.
#[derive(Debug, Clone)]
pub struct EvidenceTree {
    label: String,
    files: BTreeMap<String, FileRecord>,
    dirs: BTreeSet<String>,
    folded: BTreeMap<String, Vec<String>>,
    warnings: Vec<String>,
}

impl EvidenceTree {
    fn empty(label: impl Into<String>) -> Self {
        let mut dirs = BTreeSet::new();
        dirs.insert("/".to_string());
        EvidenceTree {
            label: label.into(),
            files: BTreeMap::new(),
            dirs,
            folded: BTreeMap::new(),
            warnings: Vec::new(),
        }
    }

    /// Opens a directory or a TAR archive.
    pub fn open(source: &Path, label: impl Into<String>) -> Result<Self, EvidenceError> {
        let meta = std::fs::metadata(source).map_err(|e| EvidenceError::Open {
            path: source.to_path_buf(),
            source: e,
        })?;
        if meta.is_dir() {
            Self::open_dir(source, label)
        } else {
            Self::open_tar(source, label)
        }
    }

    pub fn open_dir(root: &Path, label: impl Into<String>) -> Result<Self, EvidenceError> {
        std::fs::read_dir(root).map_err(|e| EvidenceError::Open {
            path: root.to_path_buf(),
            source: e,
        })?;
        let mut tree = Self::empty(label);
        for item in walkdir::WalkDir::new(root)
            .follow_links(false)
            .sort_by_file_name()
        {
            let item = match item {
                Ok(i) => i,
                Err(e) => {
                    tree.warnings.push(format!("skipped unreadable entry: {e}"));
                    continue;
                }
            };
            let rel = match item.path().strip_prefix(root) {
                Ok(r) => r.to_string_lossy().into_owned(),
                Err(_) => continue,
            };
            let norm = normalize_path(&rel);
            let ft = item.file_type();
            if ft.is_dir() {
                tree.add_dir(&norm);
            } else if ft.is_file() {
                match item.metadata() {
                    Ok(m) => tree.add_file(
                        norm,
                        FileRecord {
                            size: m.len(),
                            location: Location::Disk(item.path().to_path_buf()),
                        },
                    ),
                    Err(e) => tree.warnings.push(format!("skipped {norm}: {e}")),
                }
            }
        }
        Ok(tree)
    }

    pub fn open_tar(archive: &Path, label: impl Into<String>) -> Result<Self, EvidenceError> {
        let file = File::open(archive).map_err(|e| EvidenceError::Open {
            path: archive.to_path_buf(),
            source: e,
        })?;
        let tar_err = |e| EvidenceError::Tar {
            path: archive.to_path_buf(),
            source: e,
        };
        let shared = Arc::new(archive.to_path_buf());
        let mut tree = Self::empty(label);
        let mut ar = tar::Archive::new(file);
        for entry in ar.entries().map_err(tar_err)? {
            let entry = entry.map_err(tar_err)?;
            let path = match entry.path() {
                Ok(p) => normalize_path(&p.to_string_lossy()),
                Err(e) => {
                    tree.warnings
                        .push(format!("skipped TAR member with bad name: {e}"));
                    continue;
                }
            };
            match entry.header().entry_type() {
                tar::EntryType::Directory => tree.add_dir(&path),
                tar::EntryType::Regular | tar::EntryType::Continuous => tree.add_file(
                    path,
                    FileRecord {
                        size: entry.size(),
                        location: Location::TarMember {
                            archive: shared.clone(),
                            offset: entry.raw_file_position(),
                        },
                    },
                ),
                _ => {}
            }
        }
        Ok(tree)
    }

    /// Builds an in-memory tree; later duplicates replace earlier ones.
    pub fn from_memory<I, P>(label: impl Into<String>, files: I) -> Self
    where
        I: IntoIterator<Item = (P, Arc<[u8]>)>,
        P: AsRef<str>,
    {
        let mut tree = Self::empty(label);
        for (p, bytes) in files {
            let norm = normalize_path(p.as_ref());
            tree.add_file(
                norm,
                FileRecord {
                    size: bytes.len() as u64,
                    location: Location::Memory(bytes),
                },
            );
        }
        tree
    }

    /// Adds an empty directory to an in-memory tree.
    pub fn with_dir(mut self, dir: &str) -> Self {
        self.add_dir(&normalize_path(dir));
        self
    }

    fn add_dir(&mut self, norm: &str) {
        let mut cur = norm;
        while self.dirs.insert(cur.to_string()) {
            self.folded
                .entry(cur.to_lowercase())
                .or_default()
                .push(cur.to_string());
            if cur == "/" {
                break;
            }
            cur = parent_of(cur);
        }
    }

    fn add_file(&mut self, norm: String, rec: FileRecord) {
        self.add_dir(parent_of(&norm));
        if self.files.insert(norm.clone(), rec).is_none() {
            self.folded
                .entry(norm.to_lowercase())
                .or_default()
                .push(norm);
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn len(&self) -> usize {
        self.files.len()
    }

    pub fn is_empty(&self) -> bool {
        self.files.is_empty()
    }

    /// File paths in sorted order.
    pub fn paths(&self) -> impl Iterator<Item = &str> {
        self.files.keys().map(String::as_str)
    }

    pub fn dirs(&self) -> impl Iterator<Item = &str> {
        self.dirs.iter().map(String::as_str)
    }

    pub fn is_file(&self, path: &str) -> bool {
        self.files.contains_key(path)
    }

    pub fn is_dir(&self, path: &str) -> bool {
        self.dirs.contains(path)
    }

    pub fn size(&self, path: &str) -> Option<u64> {
        self.files.get(path).map(|r| r.size)
    }

    /// Exact lookup, falling back to a unique case-insensitive match.
    /// Works for files and directories.
    pub fn resolve(&self, path: &str) -> Option<String> {
        let norm = normalize_path(path);
        if self.files.contains_key(&norm) || self.dirs.contains(&norm) {
            return Some(norm);
        }
        match self.folded.get(&norm.to_lowercase()) {
            Some(v) if v.len() == 1 => Some(v[0].clone()),
            _ => None,
        }
    }

    /// Files directly inside `dir`.
    pub fn files_in(&self, dir: &str) -> Vec<&str> {
        let prefix = if dir == "/" {
            "/".to_string()
        } else {
            format!("{dir}/")
        };
        self.files
            .range(prefix.clone()..)
            .map(|(k, _)| k.as_str())
            .take_while(|k| k.starts_with(&prefix))
            .filter(|k| !k[prefix.len()..].contains('/'))
            .collect()
    }

    /// Files anywhere below `dir`.
    pub fn files_under(&self, dir: &str) -> Vec<&str> {
        let prefix = if dir == "/" {
            "/".to_string()
        } else {
            format!("{dir}/")
        };
        self.files
            .range(prefix.clone()..)
            .map(|(k, _)| k.as_str())
            .take_while(|k| k.starts_with(&prefix))
            .collect()
    }

    /// Immediate subdirectories of `dir`.
    pub fn subdirs(&self, dir: &str) -> Vec<&str> {
        let prefix = if dir == "/" {
            "/".to_string()
        } else {
            format!("{dir}/")
        };
        self.dirs
            .range(prefix.clone()..)
            .map(String::as_str)
            .take_while(|k| k.starts_with(&prefix))
            .filter(|k| k.len() > prefix.len() && !k[prefix.len()..].contains('/'))
            .collect()
    }

    pub fn read(&self, path: &str) -> Result<Vec<u8>, EvidenceError> {
        let rec = self
            .files
            .get(path)
            .ok_or_else(|| EvidenceError::NotFound {
                tree: self.label.clone(),
                path: path.to_string(),
            })?;
        let read_err = |e| EvidenceError::Read {
            path: path.to_string(),
            source: e,
        };
        match &rec.location {
            Location::Memory(b) => Ok(b.to_vec()),
            Location::Disk(p) => {
                let bytes = std::fs::read(p).map_err(read_err)?;
                if bytes.len() as u64 != rec.size {
                    return Err(read_err(std::io::Error::new(
                        std::io::ErrorKind::UnexpectedEof,
                        "file size changed since listing",
                    )));
                }
                Ok(bytes)
            }
            Location::TarMember { archive, offset } => {
                let mut f = File::open(archive.as_ref()).map_err(read_err)?;
                f.seek(SeekFrom::Start(*offset)).map_err(read_err)?;
                let mut buf = vec![0u8; rec.size as usize];
                f.read_exact(&mut buf).map_err(read_err)?;
                Ok(buf)
            }
        }
    }

    /// SHA1 over the sorted listing and every file's content. Labels and
    /// on-disk locations are excluded so identical trees digest equally.
    pub fn digest(&self) -> Result<String, EvidenceError> {
        let mut h = Sha1::new();
        for path in self.files.keys() {
            let bytes = self.read(path)?;
            h.update(path.as_bytes());
            h.update([0]);
            h.update((bytes.len() as u64).to_le_bytes());
            h.update(&bytes);
        }
        Ok(crate::hashing::to_hex(&h.finalize()))
    }
}

/// A flat byte image, used only for carving.
#[derive(Debug, Clone)]
pub struct RawImage {
    label: String,
    bytes: Arc<[u8]>,
}

impl RawImage {
    pub fn open(path: &Path, label: impl Into<String>) -> Result<Self, EvidenceError> {
        let bytes = std::fs::read(path).map_err(|e| EvidenceError::Open {
            path: path.to_path_buf(),
            source: e,
        })?;
        Ok(RawImage {
            label: label.into(),
            bytes: bytes.into(),
        })
    }

    pub fn from_bytes(label: impl Into<String>, bytes: impl Into<Arc<[u8]>>) -> Self {
        RawImage {
            label: label.into(),
            bytes: bytes.into(),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn len(&self) -> usize {
        self.bytes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bytes.is_empty()
    }

    pub fn slice(&self, offset: u64, length: u64) -> Option<&[u8]> {
        let start = usize::try_from(offset).ok()?;
        let end = start.checked_add(usize::try_from(length).ok()?)?;
        self.bytes.get(start..end)
    }

    pub fn sha1(&self) -> String {
        crate::hashing::sha1_hex(&self.bytes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mem(files: &[(&str, &[u8])]) -> EvidenceTree {
        EvidenceTree::from_memory("t", files.iter().map(|(p, b)| (*p, Arc::<[u8]>::from(*b))))
    }

    #[test]
    fn normalizes_paths() {
        assert_eq!(normalize_path("data/data/x"), "/data/data/x");
        assert_eq!(normalize_path("./a//b/"), "/a/b");
        assert_eq!(normalize_path(""), "/");
        assert_eq!(parent_of("/a/b"), "/a");
        assert_eq!(parent_of("/a"), "/");
        assert_eq!(file_name_of("/a/b.txt"), "b.txt");
    }

    #[test]
    fn listing_and_reading() {
        let t = mem(&[
            ("data/data/com.dropbox.android/files/log.txt", b"x"),
            ("z", b""),
        ]);
        assert!(t.is_file("/data/data/com.dropbox.android/files/log.txt"));
        assert!(t.is_dir("/data/data"));
        assert_eq!(t.read("/z").unwrap(), Vec::<u8>::new());
        assert!(matches!(
            t.read("/nope"),
            Err(EvidenceError::NotFound { .. })
        ));
        assert_eq!(t.subdirs("/data"), vec!["/data/data"]);
        assert_eq!(t.files_in("/"), vec!["/z"]);
        assert_eq!(t.files_under("/data").len(), 1);
    }

    #[test]
    fn case_insensitive_fallback_is_unique_only() {
        let t = mem(&[
            ("/App/Library/Caches/a", b"1"),
            ("/App/library/preferences/p", b"2"),
        ]);
        assert_eq!(
            t.resolve("/App/Library/Caches/a").as_deref(),
            Some("/App/Library/Caches/a")
        );
        assert_eq!(
            t.resolve("/app/library/caches/A").as_deref(),
            Some("/App/Library/Caches/a")
        );
        let amb = mem(&[("/x/A", b"1"), ("/x/a", b"2")]);
        assert_eq!(amb.resolve("/x/A").as_deref(), Some("/x/A"));
        assert_eq!(amb.resolve("/X/A"), None);
    }

    #[test]
    fn empty_directory_tree() {
        let dir = tempfile::tempdir().unwrap();
        let t = EvidenceTree::open(dir.path(), "e").unwrap();
        assert!(t.is_empty());
    }

    #[test]
    fn missing_source_is_fatal() {
        assert!(EvidenceTree::open(Path::new("/definitely/not/here"), "x").is_err());
    }

    #[test]
    fn directory_and_tar_forms_agree() {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path().join("root");
        let files: Vec<(&str, Vec<u8>)> = vec![
            (
                "data/data/com.dropbox.android/files/log.txt",
                b"1335445000 account created\n".to_vec(),
            ),
            (
                "mnt/sdcard/01.jpg",
                (0..43183u32).map(|i| (i * 7) as u8).collect(),
            ),
            ("empty.bin", Vec::new()),
        ];
        for (p, b) in &files {
            let full = root.join(p);
            std::fs::create_dir_all(full.parent().unwrap()).unwrap();
            std::fs::write(full, b).unwrap();
        }
        let tar_path = dir.path().join("root.tar");
        {
            let mut builder = tar::Builder::new(File::create(&tar_path).unwrap());
            builder.append_dir_all(".", &root).unwrap();
            builder.finish().unwrap();
        }
        let before = crate::hashing::sha1_hex(&std::fs::read(&tar_path).unwrap());
        let d = EvidenceTree::open(&root, "dir").unwrap();
        let t = EvidenceTree::open(&tar_path, "tar").unwrap();
        let triples = |tree: &EvidenceTree| -> Vec<(String, u64, String)> {
            tree.paths()
                .map(|p| {
                    let b = tree.read(p).unwrap();
                    assert_eq!(b.len() as u64, tree.size(p).unwrap());
                    (p.to_string(), b.len() as u64, crate::hashing::md5_hex(&b))
                })
                .collect()
        };
        assert_eq!(triples(&d), triples(&t));
        assert_eq!(d.size("/mnt/sdcard/01.jpg"), Some(43183));
        assert_eq!(d.digest().unwrap(), t.digest().unwrap());
        let after = crate::hashing::sha1_hex(&std::fs::read(&tar_path).unwrap());
        assert_eq!(before, after);
    }

    #[test]
    fn raw_image_slices() {
        let img = RawImage::from_bytes("r", vec![1u8, 2, 3, 4]);
        assert_eq!(img.slice(1, 2), Some(&[2u8, 3][..]));
        assert_eq!(img.slice(3, 2), None);
        assert_eq!(img.slice(u64::MAX, 1), None);
    }
}

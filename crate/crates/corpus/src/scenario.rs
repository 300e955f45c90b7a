//! Scenario generation: evidence trees, raw image and manifest for one
//! application build in one device state.

use std::collections::BTreeSet;
use std::path::Path;
use std::sync::Arc;

use cloudsift::analyzers::{KnownFile, KnownSet};
use cloudsift::evidence::{EvidenceTree, RawImage};
use cloudsift::locator::{ArtifactRole, IOS_APPLICATIONS};
use cloudsift::model::{AppIdentity, DeviceState, Platform, Rendition, TableMark};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{DatasetFile, DatasetSpec};
use crate::expected::{expected_marks, is_reconstructed};
use crate::{layouts, GenError};

pub const INTERNAL: &str = "internal";
pub const SD: &str = "sd";
pub const RAW: &str = "raw";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    pub identity: AppIdentity,
    pub state: DeviceState,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedFile {
    pub name: String,
    pub mark: TableMark,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExpectedArtifact {
    pub role: ArtifactRole,
    pub tree: String,
    pub path: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileHash {
    pub name: String,
    pub size: u64,
    pub md5: String,
    pub sha1: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueExtent {
    pub name: String,
    pub rendition: Rendition,
    pub offset: u64,
    pub length: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub identity: AppIdentity,
    pub state: DeviceState,
    pub seed: u64,
    pub dataset_seed: u64,
    pub expected: Vec<ExpectedFile>,
    /// Expected cells were rebuilt from secondary sources.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub reconstructed: bool,
    pub artifacts: Vec<ExpectedArtifact>,
    pub files: Vec<FileHash>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub carve_offsets: Vec<ResidueExtent>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

pub struct Generated {
    pub internal: EvidenceTree,
    pub sd: Option<EvidenceTree>,
    pub raw: Option<RawImage>,
    pub manifest: Manifest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Tree {
    Internal,
    Sd,
}

#[derive(Default)]
pub(crate) struct TreeBuf {
    files: Vec<(String, Arc<[u8]>)>,
    dirs: BTreeSet<String>,
}

impl TreeBuf {
    fn build(self, label: &str) -> EvidenceTree {
        let mut t = EvidenceTree::from_memory(label, self.files);
        for d in &self.dirs {
            t = t.with_dir(d);
        }
        t
    }
}

/// Mutable state shared by the per-provider layout functions.
pub(crate) struct Layout<'a> {
    pub data: &'a DatasetSpec,
    pub rng: ChaCha8Rng,
    pub cleared: bool,
    pub approot: String,
    internal: TreeBuf,
    sd: Option<TreeBuf>,
    residue: Vec<(String, Rendition, Arc<[u8]>)>,
    artifacts: Vec<ExpectedArtifact>,
    pub notes: Vec<String>,
}

impl<'a> Layout<'a> {
    pub fn file(&self, n: usize) -> &'a DatasetFile {
        self.data.file(n)
    }

    fn buf(&mut self, t: Tree) -> &mut TreeBuf {
        match t {
            Tree::Internal => &mut self.internal,
            Tree::Sd => self.sd.get_or_insert_with(TreeBuf::default),
        }
    }

    /// Prefixes iOS paths with the application folder.
    pub fn at(&self, path: &str) -> String {
        format!("{}{path}", self.approot)
    }

    pub fn put(&mut self, t: Tree, path: &str, bytes: impl Into<Arc<[u8]>>) {
        self.buf(t).files.push((path.to_string(), bytes.into()));
    }

    pub fn dir(&mut self, t: Tree, path: &str) {
        self.buf(t).dirs.insert(path.to_string());
    }

    /// Declares a location the registry must resolve; directories are
    /// created even when left empty.
    pub fn expect(&mut self, role: ArtifactRole, t: Tree, path: &str) {
        if role.is_dir() {
            self.dir(t, path);
        }
        self.artifacts.push(ExpectedArtifact {
            role,
            tree: match t {
                Tree::Internal => INTERNAL,
                Tree::Sd => SD,
            }
            .to_string(),
            path: path.to_string(),
        });
    }

    pub fn residue(&mut self, name: &str, rendition: Rendition, bytes: Arc<[u8]>) {
        self.residue.push((name.to_string(), rendition, bytes));
    }

    pub fn original(&mut self, n: usize) -> Arc<[u8]> {
        self.file(n).bytes.clone()
    }

    pub fn thumb(&self, n: usize) -> Arc<[u8]> {
        self.file(n).thumbnail.clone().expect("image file")
    }

    pub fn random_blob(&mut self, min: usize, max: usize) -> Vec<u8> {
        let n = self.rng.gen_range(min..max);
        let mut v = vec![0u8; n];
        self.rng.fill_bytes(&mut v);
        v
    }

    pub fn hex_name(&mut self, len: usize) -> String {
        (0..len)
            .map(|_| char::from_digit(self.rng.gen_range(0..16), 16).unwrap())
            .collect()
    }
}

fn fnv(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

/// Seed for one scenario. Power state is deliberately not an input, so
/// powered-down scenarios reproduce their powered-on counterparts exactly.
fn scenario_seed(s: &Scenario) -> u64 {
    s.seed
        ^ fnv(&s.identity.to_string())
        ^ if s.state.cache_cleared() {
            0x005e_edcc
        } else {
            0
        }
}

fn ios_app_folder(rng: &mut impl RngCore) -> String {
    let hex = |n: usize, rng: &mut dyn RngCore| -> String {
        (0..n)
            .map(|_| {
                char::from_digit(rng.next_u32() % 16, 16)
                    .unwrap()
                    .to_ascii_uppercase()
            })
            .collect()
    };
    format!(
        "{}-{}-{}-{}-{}",
        hex(8, rng),
        hex(4, rng),
        hex(4, rng),
        hex(4, rng),
        hex(12, rng)
    )
}

/// Filler that cannot start any carving signature: the first bytes of every
/// built-in header are remapped.
pub fn filler(rng: &mut impl RngCore, n: usize) -> Vec<u8> {
    let mut v = vec![0u8; n];
    rng.fill_bytes(&mut v);
    for b in &mut v {
        if matches!(*b, 0xFF | b'%' | b'P' | b'I' | b'f') {
            *b ^= 0x80;
        }
    }
    v
}

fn raw_image(
    rng: &mut ChaCha8Rng,
    residue: &[(String, Rendition, Arc<[u8]>)],
) -> (Vec<u8>, Vec<ResidueExtent>) {
    let total: usize = residue.iter().map(|r| r.2.len()).sum();
    let mut out = Vec::with_capacity(total + (residue.len() + 1) * 40_000 + 65_536);
    let mut extents = Vec::new();
    out.extend(filler(rng, 65_536));
    for (name, rendition, bytes) in residue {
        extents.push(ResidueExtent {
            name: name.clone(),
            rendition: *rendition,
            offset: out.len() as u64,
            length: bytes.len() as u64,
        });
        out.extend_from_slice(bytes);
        let gap = rng.gen_range(4096..36_864);
        out.extend(filler(rng, gap));
    }
    (out, extents)
}

/// Reference hashes: every original plus every thumbnail rendition.
pub fn known_set(data: &DatasetSpec) -> KnownSet {
    let mut files = Vec::new();
    for f in &data.files {
        files.push(KnownFile {
            name: f.name.clone(),
            rendition: Rendition::Original,
            size: f.size,
            md5: f.md5.clone(),
            sha1: f.sha1.clone(),
        });
        if let Some(t) = &f.thumbnail {
            files.push(KnownFile {
                name: f.name.clone(),
                rendition: Rendition::Thumbnail,
                size: t.len() as u64,
                md5: cloudsift::hashing::md5_hex(t),
                sha1: cloudsift::hashing::sha1_hex(t),
            });
        }
    }
    KnownSet { files }
}

pub fn generate(scenario: &Scenario, data: &DatasetSpec) -> Result<Generated, GenError> {
    let id = &scenario.identity;
    if !id.is_cataloged() {
        return Err(GenError::Uncataloged(id.to_string()));
    }
    let marks =
        expected_marks(id, scenario.state).ok_or_else(|| GenError::Uncataloged(id.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(scenario_seed(scenario));
    let approot = match id.platform {
        Platform::Ios => format!("{IOS_APPLICATIONS}/{}", ios_app_folder(&mut rng)),
        Platform::Android => String::new(),
    };
    let mut l = Layout {
        data,
        rng,
        cleared: scenario.state.cache_cleared(),
        approot,
        internal: TreeBuf::default(),
        sd: None,
        residue: Vec::new(),
        artifacts: Vec::new(),
        notes: Vec::new(),
    };
    layouts::populate(&mut l, id)?;

    let raw = (id.platform == Platform::Android).then(|| {
        let residue = std::mem::take(&mut l.residue);
        let (bytes, extents) = raw_image(&mut l.rng, &residue);
        (RawImage::from_bytes(RAW, bytes), extents)
    });
    let (raw, carve_offsets) = match raw {
        Some((r, e)) => (Some(r), e),
        None => (None, Vec::new()),
    };
    let reconstructed = is_reconstructed(id);
    let mut notes = l.notes;
    if reconstructed {
        notes.push(
            "expected cells rebuilt from the per-device union sets and layout descriptions"
                .to_string(),
        );
    }
    let mut artifacts = l.artifacts;
    artifacts.sort();
    let manifest = Manifest {
        identity: id.clone(),
        state: scenario.state,
        seed: scenario.seed,
        dataset_seed: data.seed,
        expected: data
            .files
            .iter()
            .zip(marks)
            .map(|(f, mark)| ExpectedFile {
                name: f.name.clone(),
                mark,
            })
            .collect(),
        reconstructed,
        artifacts,
        files: data
            .files
            .iter()
            .map(|f| FileHash {
                name: f.name.clone(),
                size: f.size,
                md5: f.md5.clone(),
                sha1: f.sha1.clone(),
            })
            .collect(),
        carve_offsets,
        notes,
    };
    Ok(Generated {
        internal: l.internal.build(INTERNAL),
        sd: l.sd.map(|b| b.build(SD)),
        raw,
        manifest,
    })
}

fn write_tree(tree: &EvidenceTree, root: &Path) -> Result<(), GenError> {
    for d in tree.dirs() {
        std::fs::create_dir_all(root.join(d.trim_start_matches('/')))?;
    }
    for p in tree.paths() {
        let dest = root.join(p.trim_start_matches('/'));
        if let Some(parent) = dest.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(dest, tree.read(p)?)?;
    }
    Ok(())
}

/// Writes `internal/`, `sd/`, `raw.img`, `manifest.json` and
/// `known_files.json` under `out`.
pub fn write_scenario(g: &Generated, data: &DatasetSpec, out: &Path) -> Result<(), GenError> {
    std::fs::create_dir_all(out)?;
    write_tree(&g.internal, &out.join(INTERNAL))?;
    if let Some(sd) = &g.sd {
        write_tree(sd, &out.join(SD))?;
    }
    if let Some(raw) = &g.raw {
        std::fs::write(out.join("raw.img"), raw.bytes())?;
    }
    std::fs::write(
        out.join("manifest.json"),
        serde_json::to_string_pretty(&g.manifest)? + "\n",
    )?;
    std::fs::write(
        out.join("known_files.json"),
        serde_json::to_string_pretty(&known_set(data))? + "\n",
    )?;
    Ok(())
}

//! The twenty-file experimental dataset.

use std::sync::Arc;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::formats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FileType {
    Jpeg,
    Mp3,
    Mp4,
    Pdf,
    Docx,
}

impl FileType {
    pub fn extension(self) -> &'static str {
        match self {
            FileType::Jpeg => "jpg",
            FileType::Mp3 => "mp3",
            FileType::Mp4 => "mp4",
            FileType::Pdf => "pdf",
            FileType::Docx => "docx",
        }
    }

    pub fn build(self, size: usize, rng: &mut impl RngCore) -> Vec<u8> {
        match self {
            FileType::Jpeg => formats::jpeg(size, rng),
            FileType::Mp3 => formats::mp3(size, rng),
            FileType::Mp4 => formats::mp4(size, rng),
            FileType::Pdf => formats::pdf(size, rng),
            FileType::Docx => formats::docx(size, rng),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Manipulation {
    Viewed,
    ViewedOffline,
    NoManipulation,
    ViewedDeleted,
}

impl Manipulation {
    pub fn viewed(self) -> bool {
        self != Manipulation::NoManipulation
    }
}

use FileType::*;
use Manipulation::*;

pub const TABLE: [(&str, u64, FileType, Manipulation); 20] = [
    ("01.jpg", 43183, Jpeg, Viewed),
    ("02.jpg", 6265, Jpeg, ViewedOffline),
    ("03.jpg", 102448, Jpeg, NoManipulation),
    ("04.jpg", 5548, Jpeg, ViewedDeleted),
    ("05.mp3", 3997696, Mp3, Viewed),
    ("06.mp3", 2703360, Mp3, ViewedOffline),
    ("07.mp3", 3512009, Mp3, NoManipulation),
    ("08.mp3", 4266779, Mp3, ViewedDeleted),
    ("09.mp4", 831687, Mp4, Viewed),
    ("10.mp4", 245779, Mp4, ViewedOffline),
    ("11.mp4", 11986533, Mp4, NoManipulation),
    ("12.mp4", 21258947, Mp4, ViewedDeleted),
    ("13.pdf", 1695706, Pdf, Viewed),
    ("14.pdf", 471999, Pdf, ViewedOffline),
    ("15.pdf", 2371383, Pdf, NoManipulation),
    ("16.pdf", 1688736, Pdf, ViewedDeleted),
    ("17.docx", 84272, Docx, Viewed),
    ("18.docx", 85091, Docx, ViewedOffline),
    ("19.docx", 14860, Docx, NoManipulation),
    ("20.docx", 20994, Docx, ViewedDeleted),
];

#[derive(Debug, Clone)]
pub struct DatasetFile {
    pub name: String,
    pub size: u64,
    pub file_type: FileType,
    pub manipulation: Manipulation,
    pub bytes: Arc<[u8]>,
    pub md5: String,
    pub sha1: String,
    /// Small JPEG rendition, present for images.
    pub thumbnail: Option<Arc<[u8]>>,
}

impl DatasetFile {
    /// 1-based position in the dataset.
    pub fn number(&self) -> usize {
        self.name[..2].parse().expect("numbered name")
    }
}

#[derive(Debug, Clone)]
pub struct DatasetSpec {
    pub seed: u64,
    pub files: Vec<DatasetFile>,
}

impl DatasetSpec {
    pub fn file(&self, number: usize) -> &DatasetFile {
        &self.files[number - 1]
    }

    pub fn numbers_with(&self, m: Manipulation) -> Vec<usize> {
        self.files
            .iter()
            .filter(|f| f.manipulation == m)
            .map(|f| f.number())
            .collect()
    }
}

/// Name and bytes of every dataset file, in Table order.
pub fn builtin_dataset(seed: u64) -> Vec<(String, Vec<u8>)> {
    TABLE
        .iter()
        .enumerate()
        .map(|(i, (name, size, ty, _))| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((i as u64 + 1) << 32));
            (name.to_string(), ty.build(*size as usize, &mut rng))
        })
        .collect()
}

fn thumbnail(seed: u64, number: usize) -> Vec<u8> {
    let mut rng =
        ChaCha8Rng::seed_from_u64(seed.wrapping_mul(31) ^ (0x7468_756d_0000 + number as u64));
    let size = 1200 + (rng.next_u32() % 1800) as usize;
    formats::jpeg(size, &mut rng)
}

pub fn dataset_spec(seed: u64) -> DatasetSpec {
    let files = builtin_dataset(seed)
        .into_iter()
        .zip(TABLE.iter())
        .enumerate()
        .map(|(i, ((name, bytes), (_, size, ty, m)))| DatasetFile {
            md5: cloudsift::hashing::md5_hex(&bytes),
            sha1: cloudsift::hashing::sha1_hex(&bytes),
            name,
            size: *size,
            file_type: *ty,
            manipulation: *m,
            thumbnail: (*ty == Jpeg).then(|| thumbnail(seed, i + 1).into()),
            bytes: bytes.into(),
        })
        .collect();
    DatasetSpec { seed, files }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn third_file_matches_box_record() {
        let d = builtin_dataset(7);
        assert_eq!(d[2].0, "03.jpg");
        assert_eq!(d[2].1.len(), 102448);
    }

    #[test]
    fn deterministic() {
        assert_eq!(builtin_dataset(5), builtin_dataset(5));
        assert_ne!(builtin_dataset(5)[0].1, builtin_dataset(6)[0].1);
    }

    #[test]
    fn manipulations_cycle_within_each_type() {
        let order = [Viewed, ViewedOffline, NoManipulation, ViewedDeleted];
        for (i, row) in TABLE.iter().enumerate() {
            assert_eq!(row.3, order[i % 4]);
            assert!(row.0.ends_with(row.2.extension()));
        }
    }
}

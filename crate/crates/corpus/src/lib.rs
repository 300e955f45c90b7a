//! Synthetic evidence for the cloud-storage client experiments: the
//! twenty-file dataset, per-build device layouts, raw residue images and the
//! expected recovery matrices.

pub mod dataset;
pub mod expected;
pub mod fixtures;
pub mod formats;
mod layouts;
pub mod scenario;
pub mod stores;

use thiserror::Error;

pub use dataset::{dataset_spec, DatasetSpec};
pub use scenario::{generate, known_set, write_scenario, Generated, Manifest, Scenario};

#[derive(Debug, Error)]
pub enum GenError {
    #[error("identity {0} is not a cataloged application build")]
    Uncataloged(String),
    #[error("sqlite: {0}")]
    Sqlite(#[from] rusqlite::Error),
    #[error("plist: {0}")]
    Plist(#[from] plist::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("evidence: {0}")]
    Evidence(#[from] cloudsift::evidence::EvidenceError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

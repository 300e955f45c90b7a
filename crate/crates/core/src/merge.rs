//! Union of per-device snapshots of one provider.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{AppSnapshot, ContentHash, Provider, RecoveryStatus};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ItemKey {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hash: Option<ContentHash>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergedItem {
    pub key: ItemKey,
    pub best_status: RecoveryStatus,
    /// Device label to the status that device achieved.
    pub provenance: BTreeMap<String, RecoveryStatus>,
    /// Hash each device reported, when it reported one.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub device_hashes: BTreeMap<String, ContentHash>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub conflicts: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergedDataset {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provider: Option<Provider>,
    pub items: Vec<MergedItem>,
}

#[derive(Debug, Error, PartialEq)]
pub enum MergeError {
    #[error("cannot merge snapshots of different providers ({0} and {1})")]
    MixedProviders(Provider, Provider),
}

/// One device's view of one file.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Observation {
    pub device: String,
    pub name: String,
    pub hash: Option<ContentHash>,
    pub status: RecoveryStatus,
}

fn hash_text(h: &Option<ContentHash>) -> String {
    h.as_ref()
        .map_or_else(|| "none".to_string(), |h| h.to_string())
}

impl MergedDataset {
    pub fn empty() -> Self {
        MergedDataset {
            provider: None,
            items: Vec::new(),
        }
    }

    pub fn observations(&self) -> Vec<Observation> {
        self.items
            .iter()
            .flat_map(|it| {
                it.provenance.iter().map(|(d, s)| Observation {
                    device: d.clone(),
                    name: it.key.name.clone(),
                    hash: it.device_hashes.get(d).cloned(),
                    status: *s,
                })
            })
            .collect()
    }

    /// Builds the dataset from observations; the result depends only on the
    /// set of observations, not their order or grouping.
    pub fn from_observations(provider: Option<Provider>, obs: Vec<Observation>) -> Self {
        let mut by_name: BTreeMap<String, Vec<Observation>> = BTreeMap::new();
        for o in obs {
            by_name.entry(o.name.clone()).or_default().push(o);
        }
        let mut items = Vec::new();
        for (name, group) in by_name {
            let hashes: BTreeSet<ContentHash> =
                group.iter().filter_map(|o| o.hash.clone()).collect();
            type Bucket = (
                BTreeMap<String, RecoveryStatus>,
                BTreeMap<String, ContentHash>,
            );
            let mut buckets: BTreeMap<Option<ContentHash>, Bucket> = BTreeMap::new();
            for o in &group {
                let key = if hashes.len() <= 1 {
                    hashes.iter().next().cloned()
                } else {
                    o.hash.clone()
                };
                let (prov, dh) = buckets.entry(key).or_default();
                let slot = prov.entry(o.device.clone()).or_insert(o.status);
                *slot = (*slot).max(o.status);
                if let Some(h) = &o.hash {
                    dh.insert(o.device.clone(), h.clone());
                }
            }
            let conflict = (hashes.len() > 1).then(|| {
                let mut seen: BTreeMap<&str, BTreeSet<String>> = BTreeMap::new();
                for o in &group {
                    seen.entry(&o.device)
                        .or_default()
                        .insert(hash_text(&o.hash));
                }
                let parts: Vec<String> = seen
                    .iter()
                    .map(|(d, hs)| {
                        format!("{d}={}", hs.iter().cloned().collect::<Vec<_>>().join("|"))
                    })
                    .collect();
                format!(
                    "{name}: content hashes differ across devices ({})",
                    parts.join(", ")
                )
            });
            for (hash, (provenance, device_hashes)) in buckets {
                let best_status = provenance
                    .values()
                    .copied()
                    .max()
                    .unwrap_or(RecoveryStatus::NotObserved);
                items.push(MergedItem {
                    key: ItemKey {
                        name: name.clone(),
                        hash,
                    },
                    best_status,
                    provenance,
                    device_hashes,
                    conflicts: conflict.iter().cloned().collect(),
                });
            }
        }
        MergedDataset { provider, items }
    }
}

fn check_provider(acc: &mut Option<Provider>, p: Provider) -> Result<(), MergeError> {
    match *acc {
        Some(q) if q != p => Err(MergeError::MixedProviders(q, p)),
        _ => {
            *acc = Some(p);
            Ok(())
        }
    }
}

pub fn merge_snapshots(labeled: &[(String, AppSnapshot)]) -> Result<MergedDataset, MergeError> {
    let mut provider = None;
    let mut obs = Vec::new();
    for (label, snap) in labeled {
        check_provider(&mut provider, snap.identity.provider)?;
        for e in &snap.entries {
            obs.push(Observation {
                device: label.clone(),
                name: e.entry.name.clone(),
                hash: e.entry.hash.clone(),
                status: e.status,
            });
        }
    }
    Ok(MergedDataset::from_observations(provider, obs))
}

/// Regroups already merged datasets.
pub fn merge_datasets(parts: &[MergedDataset]) -> Result<MergedDataset, MergeError> {
    let mut provider = None;
    let mut obs = Vec::new();
    for d in parts {
        if let Some(p) = d.provider {
            check_provider(&mut provider, p)?;
        }
        obs.extend(d.observations());
    }
    Ok(MergedDataset::from_observations(provider, obs))
}

/// Files recovered in full or by carving; thumbnails and previews excluded.
pub fn count_recovered(d: &MergedDataset) -> usize {
    d.items
        .iter()
        .filter(|i| i.best_status.counts_as_recovered())
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{
        AccountInfo, AppIdentity, CloudFileEntry, HashAlgorithm, Platform, SnapshotEntry,
    };
    use proptest::prelude::*;

    fn snap(provider: Provider, files: &[(&str, RecoveryStatus)]) -> AppSnapshot {
        AppSnapshot {
            identity: AppIdentity::new(provider, Platform::Android, "x"),
            account: AccountInfo::default(),
            entries: files
                .iter()
                .map(|(n, s)| SnapshotEntry {
                    entry: CloudFileEntry::named(*n),
                    status: *s,
                    objects: vec![],
                    sources: vec![],
                    download_url: None,
                })
                .collect(),
            events: vec![],
            artifacts: vec![],
            warnings: vec![],
            notes: vec![],
        }
    }

    fn recovered(ids: &[u32]) -> Vec<(String, RecoveryStatus)> {
        (1..=20)
            .map(|i| {
                let s = if ids.contains(&i) {
                    RecoveryStatus::RecoveredUnverified
                } else {
                    RecoveryStatus::MetadataOnly
                };
                (format!("{i:02}"), s)
            })
            .collect()
    }

    fn snap_of(ids: &[u32]) -> AppSnapshot {
        let files = recovered(ids);
        let refs: Vec<(&str, RecoveryStatus)> =
            files.iter().map(|(n, s)| (n.as_str(), *s)).collect();
        snap(Provider::Dropbox, &refs)
    }

    #[test]
    fn dropbox_union_is_nine() {
        let m = merge_snapshots(&[
            ("m1".into(), snap_of(&[2, 6, 10, 13, 14, 16, 17, 18, 20])),
            ("m2".into(), snap_of(&[2, 6, 10, 13, 14, 16, 17, 18, 20])),
            ("m3".into(), snap_of(&[2, 6, 10, 13, 14, 17, 18])),
        ])
        .unwrap();
        assert_eq!(count_recovered(&m), 9);
    }

    #[test]
    fn box_union_is_fifteen() {
        let m = merge_snapshots(&[
            (
                "m1".into(),
                snap_of(&[1, 2, 4, 5, 6, 8, 9, 10, 12, 13, 14, 16, 17, 18, 20]),
            ),
            ("m2".into(), snap_of(&[5, 6, 8, 9, 10, 12])),
            ("m3".into(), snap_of(&[2, 6, 10, 14, 18])),
        ])
        .unwrap();
        assert_eq!(count_recovered(&m), 15);
    }

    #[test]
    fn empty_and_single() {
        assert_eq!(count_recovered(&MergedDataset::empty()), 0);
        let s = snap(
            Provider::Box,
            &[
                ("a", RecoveryStatus::ThumbnailOnly),
                ("b", RecoveryStatus::CarvedDeleted),
            ],
        );
        let m = merge_snapshots(&[("d".into(), s)]).unwrap();
        assert_eq!(m.items.len(), 2);
        assert_eq!(m.items[0].key.name, "a");
        assert_eq!(m.items[0].best_status, RecoveryStatus::ThumbnailOnly);
        assert_eq!(count_recovered(&m), 1);
    }

    #[test]
    fn mixed_providers_rejected() {
        let r = merge_snapshots(&[
            ("a".into(), snap(Provider::Box, &[])),
            ("b".into(), snap(Provider::Dropbox, &[])),
        ]);
        assert_eq!(
            r,
            Err(MergeError::MixedProviders(Provider::Box, Provider::Dropbox))
        );
    }

    #[test]
    fn differing_hashes_split_and_flag() {
        let mut a = snap(Provider::Box, &[("f", RecoveryStatus::RecoveredIntact)]);
        let mut b = a.clone();
        a.entries[0].entry.hash =
            Some(ContentHash::new(HashAlgorithm::Sha1, &"a".repeat(40)).unwrap());
        b.entries[0].entry.hash =
            Some(ContentHash::new(HashAlgorithm::Sha1, &"b".repeat(40)).unwrap());
        let m = merge_snapshots(&[("d1".into(), a), ("d2".into(), b)]).unwrap();
        assert_eq!(m.items.len(), 2);
        assert!(m.items.iter().all(|i| i.conflicts.len() == 1));
    }

    fn arb_status() -> impl Strategy<Value = RecoveryStatus> {
        prop_oneof![
            Just(RecoveryStatus::NotObserved),
            Just(RecoveryStatus::MetadataOnly),
            Just(RecoveryStatus::ThumbnailOnly),
            Just(RecoveryStatus::CarvedDeleted),
            Just(RecoveryStatus::RecoveredIntact),
        ]
    }

    fn arb_snap() -> impl Strategy<Value = AppSnapshot> {
        proptest::collection::btree_map(
            0u8..12,
            (arb_status(), proptest::option::of(0u8..2)),
            0..10,
        )
        .prop_map(|m| {
            let mut s = snap(Provider::SugarSync, &[]);
            for (n, (st, h)) in m {
                let mut e = CloudFileEntry::named(format!("{n:02}"));
                e.hash = h.map(|h| {
                    ContentHash::new(HashAlgorithm::Md5, &format!("{h:x}").repeat(32)).unwrap()
                });
                s.entries.push(SnapshotEntry {
                    entry: e,
                    status: st,
                    objects: vec![],
                    sources: vec![],
                    download_url: None,
                });
            }
            s
        })
    }

    proptest! {
        #[test]
        fn algebra(a in arb_snap(), b in arb_snap(), c in arb_snap()) {
            let l = |n: &str, s: &AppSnapshot| (n.to_string(), s.clone());
            let abc = merge_snapshots(&[l("a", &a), l("b", &b), l("c", &c)]).unwrap();
            let cab = merge_snapshots(&[l("c", &c), l("a", &a), l("b", &b)]).unwrap();
            prop_assert_eq!(&abc, &cab);
            let ab = merge_snapshots(&[l("a", &a), l("b", &b)]).unwrap();
            let cm = merge_snapshots(&[l("c", &c)]).unwrap();
            prop_assert_eq!(&merge_datasets(&[ab, cm]).unwrap(), &abc);
            let single = merge_snapshots(&[l("a", &a)]).unwrap();
            prop_assert_eq!(&merge_snapshots(&[l("a", &a), l("a", &a)]).unwrap(), &single);
            let counts = [&a, &b, &c].map(|s| count_recovered(&merge_snapshots(&[l("x", s)]).unwrap()));
            let u = count_recovered(&abc);
            prop_assert!(counts.iter().copied().max().unwrap() <= u);
            prop_assert!(u <= counts.iter().sum());
        }
    }
}

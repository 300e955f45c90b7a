//! Recovery matrices and per-device recovered sets, as published.
//!
//! Marks are one character per dataset file: `v` recovered, `D` recovered
//! from deleted space, `T` thumbnail only, `.` nothing.

use cloudsift::model::{AppIdentity, DeviceState, Platform, Provider, TableMark};

struct Row {
    provider: Provider,
    platform: Platform,
    version: &'static str,
    aps: &'static str,
    cc: &'static str,
    /// Cells rebuilt from the per-device sets and prose rather than read
    /// directly off the table.
    reconstructed: bool,
}

const fn row(
    provider: Provider,
    platform: Platform,
    version: &'static str,
    aps: &'static str,
    cc: &'static str,
    reconstructed: bool,
) -> Row {
    Row {
        provider,
        platform,
        version,
        aps,
        cc,
        reconstructed,
    }
}

use Platform::{Android, Ios};
use Provider::{Box, Dropbox, SugarSync, Syncplicity};

const ROWS: [Row; 12] = [
    row(
        Dropbox,
        Android,
        "2.1.3",
        "TvTT.v...v..vv.Dvv.D",
        "TvTT.v...v..Dv.DDv.D",
        false,
    ),
    row(
        Dropbox,
        Android,
        "2.2.2",
        "TvTT.v...v..vv.Dvv.D",
        "TvTT.v...v..Dv.DDv.D",
        false,
    ),
    row(
        Dropbox,
        Ios,
        "1.4.7",
        "TvT..v...v..vv..vv..",
        ".v...v...v...v...v..",
        false,
    ),
    row(
        Box,
        Android,
        "1.6.7",
        "vvTvvv.vvv.vvv.vvv.v",
        "DDTDDD.DDD.DDD.DDD.D",
        false,
    ),
    row(
        Box,
        Android,
        "2.0.2",
        "TTTTvv.vvv.v........",
        "TTTT...DDD.D........",
        false,
    ),
    row(
        Box,
        Ios,
        "2.7.1",
        "TvTT.v...v...v...v..",
        "TvTT.v...v...v...v..",
        false,
    ),
    row(
        SugarSync,
        Android,
        "3.6",
        "vvTv.v...v..vv.vvv.v",
        "DvTD.v...v..vv.vDv.D",
        false,
    ),
    row(
        SugarSync,
        Android,
        "3.6.2",
        "vvTv.v...v..vv.vvv.v",
        "DvTD.v...v..vv.vDv.D",
        false,
    ),
    row(
        SugarSync,
        Ios,
        "3.0",
        "vv.vvv.vvv.vvv.vvv.v",
        ".v..vv.v.v...v...v..",
        false,
    ),
    row(
        Syncplicity,
        Android,
        "1.7",
        "TvTT.v...v...v..Dv.D",
        "TvTT.v...v...v..Dv.D",
        true,
    ),
    row(
        Syncplicity,
        Android,
        "2.1.1",
        "vvTvvv.vvv.vvv.vvv..",
        "DvTDDv.DDv.DDv.DDv..",
        true,
    ),
    row(
        Syncplicity,
        Ios,
        "1.6",
        "vv.vvv.vvv..vv.vvv.v",
        "....................",
        true,
    ),
];

fn find(id: &AppIdentity) -> Option<&'static Row> {
    ROWS.iter().find(|r| {
        r.provider == id.provider && r.platform == id.platform && r.version == id.version.as_str()
    })
}

fn decode(c: char) -> TableMark {
    match c {
        'v' => TableMark::Recovered,
        'D' => TableMark::Deleted,
        'T' => TableMark::Thumbnail,
        _ => TableMark::Blank,
    }
}

/// Expected mark for every dataset file, in dataset order. Power state has
/// no effect, so powered-down states share their powered-on column.
pub fn expected_marks(id: &AppIdentity, state: DeviceState) -> Option<Vec<TableMark>> {
    let r = find(id)?;
    let s = if state.cache_cleared() { r.cc } else { r.aps };
    Some(s.chars().map(decode).collect())
}

pub fn is_reconstructed(id: &AppIdentity) -> bool {
    find(id).is_some_and(|r| r.reconstructed)
}

/// The three devices of each provider in the union table.
pub fn union_devices(provider: Provider) -> [AppIdentity; 3] {
    let (a, b, c) = match provider {
        Dropbox => ((Android, "2.1.3"), (Android, "2.2.2"), (Ios, "1.4.7")),
        Box => ((Android, "1.6.7"), (Android, "2.0.2"), (Ios, "2.7.1")),
        SugarSync => ((Android, "3.6"), (Android, "3.6.2"), (Ios, "3.0")),
        Syncplicity => ((Android, "1.7"), (Android, "2.1.1"), (Ios, "1.6")),
    };
    [a, b, c].map(|(pl, v)| AppIdentity::new(provider, pl, v))
}

/// Per-device recovered file numbers and the published union count.
pub fn union_sets(provider: Provider) -> ([&'static [usize]; 3], usize) {
    match provider {
        Dropbox => (
            [
                &[2, 6, 10, 13, 14, 16, 17, 18, 20],
                &[2, 6, 10, 13, 14, 16, 17, 18, 20],
                &[2, 6, 10, 13, 14, 17, 18],
            ],
            9,
        ),
        Box => (
            [
                &[1, 2, 4, 5, 6, 8, 9, 10, 12, 13, 14, 16, 17, 18, 20],
                &[5, 6, 8, 9, 10, 12],
                &[2, 6, 10, 14, 18],
            ],
            15,
        ),
        SugarSync => (
            [
                &[1, 2, 4, 6, 10, 13, 14, 16, 17, 18, 20],
                &[1, 2, 4, 6, 10, 13, 14, 16, 17, 18, 20],
                &[1, 2, 4, 5, 6, 8, 9, 10, 12, 13, 14, 16, 17, 18, 20],
            ],
            15,
        ),
        Syncplicity => (
            [
                &[2, 6, 10, 14, 17, 18, 20],
                &[1, 2, 4, 5, 6, 8, 9, 10, 12, 13, 14, 16, 17, 18],
                &[1, 2, 4, 5, 6, 8, 9, 10, 13, 14, 16, 17, 18, 20],
            ],
            15,
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn every_cataloged_identity_has_a_row() {
        for id in AppIdentity::all_cataloged() {
            for s in DeviceState::ALL {
                assert_eq!(expected_marks(&id, s).unwrap().len(), 20, "{id}");
            }
        }
    }

    // The active-state columns of the matrices agree with the union table.
    #[test]
    fn matrices_agree_with_union_sets() {
        for p in Provider::ALL {
            let (sets, total) = union_sets(p);
            let mut union = BTreeSet::new();
            for (id, set) in union_devices(p).iter().zip(sets) {
                let marks = expected_marks(id, DeviceState::ActivePowerState).unwrap();
                let got: Vec<usize> = marks
                    .iter()
                    .enumerate()
                    .filter(|(_, m)| matches!(m, TableMark::Recovered | TableMark::Deleted))
                    .map(|(i, _)| i + 1)
                    .collect();
                assert_eq!(got, set, "{id}");
                union.extend(set.iter().copied());
            }
            assert_eq!(union.len(), total, "{p}");
        }
    }
}

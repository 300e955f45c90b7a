use std::collections::BTreeMap;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use cloudsift::analyzers::{reconstruct_box_url, KnownSet};
use cloudsift::codecs::logs::parse_json_lines_log;
use cloudsift::evidence::{EvidenceTree, RawImage};
use cloudsift::locator::builtin_registry;
use cloudsift::merge::{count_recovered, merge_datasets, merge_snapshots, MergedDataset};
use cloudsift::model::{
    AccountInfo, AppIdentity, AppSnapshot, CloudFileEntry, ContentHash, DeviceState, HashAlgorithm,
    Platform, Provider, RecoveryStatus, Scalar, SnapshotEntry, TableMark,
};
use cloudsift_cli::commands::merge_reports;
use cloudsift_cli::pipeline::{analyze_evidence, Evidence, INTERNAL_LABEL, RAW_LABEL, SD_LABEL};
use cloudsift_cli::report::Report;
use cloudsift_corpus::dataset::{dataset_spec, FileType};
use cloudsift_corpus::fixtures::{
    carve_trial, check_plist, check_sqlite, plist_tree, sqlite_fixture,
};
use cloudsift_corpus::{generate, write_scenario, Manifest, Scenario};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_130_101;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

struct Analyzed {
    id: AppIdentity,
    state: DeviceState,
    report: Report,
    manifest: Manifest,
}

fn is_snapshot_of(s: &AppSnapshot, id: &AppIdentity) -> bool {
    s.identity == *id
        || (s.identity.provider == id.provider
            && s.identity.platform == id.platform
            && s.identity.version.is_unknown()
            && id.sibling_versions().contains(&id.version.as_str()))
}

/// gen-corpus to disk, then analyze from disk, as the two subcommands do.
fn run_scenario(id: &AppIdentity, state: DeviceState, root: &Path) -> Result<Analyzed, String> {
    let data = dataset_spec(SEED);
    let scenario = Scenario {
        identity: id.clone(),
        state,
        seed: SEED,
    };
    let g = generate(&scenario, &data).map_err(|e| e.to_string())?;
    let dir = root.join(format!(
        "{}-{}-{}-{state:?}",
        id.provider, id.platform, id.version
    ));
    write_scenario(&g, &data, &dir).map_err(|e| e.to_string())?;

    let internal =
        EvidenceTree::open(&dir.join("internal"), INTERNAL_LABEL).map_err(|e| e.to_string())?;
    let sd = dir.join("sd");
    let sd = sd
        .exists()
        .then(|| EvidenceTree::open(&sd, SD_LABEL))
        .transpose()
        .map_err(|e| e.to_string())?;
    let raw = dir.join("raw.img");
    let raw = raw
        .exists()
        .then(|| RawImage::open(&raw, RAW_LABEL))
        .transpose()
        .map_err(|e| e.to_string())?;
    let known: KnownSet = serde_json::from_slice(
        &std::fs::read(dir.join("known_files.json")).map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;
    let manifest: Manifest = serde_json::from_slice(
        &std::fs::read(dir.join("manifest.json")).map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;

    let report = analyze_evidence(
        &Evidence { internal, sd, raw },
        &builtin_registry(),
        Some(&known),
    );
    std::fs::remove_dir_all(&dir).map_err(|e| e.to_string())?;
    Ok(Analyzed {
        id: id.clone(),
        state,
        report,
        manifest,
    })
}

fn run_matrix() -> (Vec<Analyzed>, Vec<String>, Duration) {
    let start = Instant::now();
    let root = tempfile::tempdir().expect("temp dir");
    let jobs: Vec<(AppIdentity, DeviceState)> = AppIdentity::all_cataloged()
        .into_iter()
        .flat_map(|id| DeviceState::ALL.map(|s| (id.clone(), s)))
        .collect();
    let workers = std::thread::available_parallelism()
        .map_or(4, |n| n.get())
        .min(8);
    let chunks: Vec<&[(AppIdentity, DeviceState)]> =
        jobs.chunks(jobs.len().div_ceil(workers)).collect();
    let results: Vec<Result<Analyzed, String>> = std::thread::scope(|s| {
        let handles: Vec<_> = chunks
            .iter()
            .map(|chunk| {
                let root = root.path();
                s.spawn(move || {
                    chunk
                        .iter()
                        .map(|(id, st)| {
                            run_scenario(id, *st, root).map_err(|e| format!("{id} {st:?}: {e}"))
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker"))
            .collect()
    });
    let mut ok = Vec::new();
    let mut errors = Vec::new();
    for r in results {
        match r {
            Ok(a) => ok.push(a),
            Err(e) => errors.push(e),
        }
    }
    (ok, errors, start.elapsed())
}

fn matrix(runs: &[Analyzed], errors: &[String], elapsed: Duration) -> Outcome {
    let mut cells = 0;
    let mut agree = 0;
    let mut bad = errors.to_vec();
    for a in runs {
        let want: Vec<(&str, TableMark)> = a
            .manifest
            .expected
            .iter()
            .map(|e| (e.name.as_str(), e.mark))
            .collect();
        cells += want.len();
        let snaps: Vec<&AppSnapshot> = a
            .report
            .snapshots
            .iter()
            .filter(|s| is_snapshot_of(s, &a.id))
            .collect();
        if snaps.len() != 1 || a.report.snapshots.len() != 1 {
            bad.push(format!(
                "{} {:?}: {} snapshots",
                a.id,
                a.state,
                a.report.snapshots.len()
            ));
            continue;
        }
        for (name, mark) in want {
            let got = snaps[0]
                .entries
                .iter()
                .find(|e| e.entry.name == name)
                .map_or(TableMark::Blank, |e| e.status.table_mark());
            if got == mark {
                agree += 1;
            } else {
                bad.push(format!(
                    "{} {:?} {name}: want {mark:?} got {got:?}",
                    a.id, a.state
                ));
            }
        }
    }
    let fast = elapsed < Duration::from_secs(120);
    let detail = format!(
        "{} scenarios, {agree}/{cells} cells agree, {:.1}s{}",
        runs.len(),
        elapsed.as_secs_f64(),
        first_few(&bad)
    );
    outcome(
        runs.len() == 48 && cells == 960 && agree == 960 && fast,
        detail,
    )
}

fn first_few(errors: &[String]) -> String {
    if errors.is_empty() {
        String::new()
    } else {
        format!(
            "; {}",
            errors
                .iter()
                .take(3)
                .cloned()
                .collect::<Vec<_>>()
                .join("; ")
        )
    }
}

fn unions(runs: &[Analyzed]) -> Outcome {
    let want = [
        (Provider::Dropbox, 9),
        (Provider::Box, 15),
        (Provider::SugarSync, 15),
        (Provider::Syncplicity, 15),
    ];
    let mut parts = Vec::new();
    let mut pass = true;
    for (provider, n) in want {
        let labeled: Vec<(String, Report)> = runs
            .iter()
            .filter(|a| a.id.provider == provider && a.state == DeviceState::ActivePowerState)
            .map(|a| {
                (
                    format!("{}-{}", a.id.platform, a.id.version),
                    a.report.clone(),
                )
            })
            .collect();
        let got = match merge_reports(&labeled) {
            Ok(r) if r.merged.len() == 1 && labeled.len() == 3 => count_recovered(&r.merged[0]),
            Ok(_) => usize::MAX,
            Err(e) => {
                parts.push(format!("{provider}: {e}"));
                pass = false;
                continue;
            }
        };
        pass &= got == n;
        parts.push(format!("{provider} {got}/{n}"));
    }
    outcome(pass, parts.join(", "))
}

fn powered_down(runs: &[Analyzed]) -> Outcome {
    let by: BTreeMap<(String, String), &Report> = runs
        .iter()
        .map(|a| ((a.id.to_string(), format!("{:?}", a.state)), &a.report))
        .collect();
    let mut pairs = 0;
    let mut bad = Vec::new();
    for id in AppIdentity::all_cataloged() {
        for (on, off) in [
            (DeviceState::ActivePowerState, DeviceState::PoweredDown),
            (
                DeviceState::CacheCleared,
                DeviceState::CacheClearedPoweredDown,
            ),
        ] {
            let k = |s: DeviceState| (id.to_string(), format!("{s:?}"));
            match (by.get(&k(on)), by.get(&k(off))) {
                (Some(a), Some(b)) if a.deterministic_json() == b.deterministic_json() => {
                    pairs += 1
                }
                _ => bad.push(format!("{id} {off:?}")),
            }
        }
    }
    outcome(
        pairs == 24,
        format!("{pairs}/24 pairs byte-identical{}", first_few(&bad)),
    )
}

fn box_url() -> Outcome {
    let want = "https://www.box.net/api/1.0/download/u5es7xli4xejrh89kr6xu14tks6grjn3/2072716499";
    match reconstruct_box_url("u5es7xli4xejrh89kr6xu14tks6grjn3", "2072716499") {
        Ok(got) => outcome(got == want, got),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn sqlite_suite() -> Outcome {
    let mut rows = 0;
    let mut pages = std::collections::BTreeSet::new();
    let mut bad = Vec::new();
    for seed in 0..120 {
        match sqlite_fixture(seed) {
            Ok(f) => {
                pages.insert(f.page_size);
                match check_sqlite(&f) {
                    Ok(n) => rows += n,
                    Err(e) => bad.push(format!("seed {seed}: {e}")),
                }
            }
            Err(e) => bad.push(format!("seed {seed}: {e}")),
        }
    }
    outcome(
        bad.is_empty() && pages.len() == 4,
        format!(
            "120 databases, page sizes {pages:?}, {rows} rows, {} mismatches{}",
            bad.len(),
            first_few(&bad)
        ),
    )
}

fn plist_suite() -> Outcome {
    let mut trials = 0;
    let mut bad = Vec::new();
    for seed in 0..120 {
        for (uids, xml) in [(false, true), (false, false), (true, false)] {
            trials += 1;
            if let Err(e) = check_plist(&plist_tree(seed, uids), xml) {
                bad.push(format!("seed {seed} xml={xml}: {e}"));
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!(
            "{trials} trees (120 XML, 240 binary), {} mismatches{}",
            bad.len(),
            first_few(&bad)
        ),
    )
}

fn carve_suite() -> Outcome {
    let data = dataset_spec(SEED);
    let mut ok = 0;
    let mut bad = Vec::new();
    for ty in [
        FileType::Jpeg,
        FileType::Mp3,
        FileType::Mp4,
        FileType::Pdf,
        FileType::Docx,
    ] {
        let files: Vec<_> = data.files.iter().filter(|f| f.file_type == ty).collect();
        for trial in 0..20u64 {
            let f = files[trial as usize % files.len()];
            match carve_trial(&f.bytes, 1000 + trial * 31 + ty as u64) {
                Ok(()) => ok += 1,
                Err(e) => bad.push(format!("{} trial {trial}: {e}", f.name)),
            }
        }
    }
    outcome(
        ok == 100,
        format!("{ok}/100 trials byte-identical{}", first_few(&bad)),
    )
}

const ANALYTICS_LINES: &str = r#"{ "retry":0, "favorite":false, "extension":"pdf", "id":23, "cached":false, "ts":"1335445641.29", "event":"file.view.start", "size":1695706 }
{ "id":23, "ts":"1335445641.31", "size":1695706, "event":"download.start", "extension":"pdf", "connection":"wifi" }
{ "ts":"1335445641.84", "screen":"DocumentViewController", "event":"screen.view" }
{ "id":23, "ts":"1335445657.75", "size":1695706, "event":"download.success", "extension":"pdf" }
{ "id":23, "event":"file.view.success", "ts":"1335445659.92" }
{ "ts":"1335445669.71", "screen":"SearchableFolderListController", "event":"screen.view" }
{ "ts":"1335445670.04", "cached":true, "path_hash":912, "event":"metadata.load.start" }
{ "path_hash":912, "event":"metadata.load.unchanged", "ts":"1335445673.07" }
"#;

fn analytics_log() -> Outcome {
    let parsed = parse_json_lines_log(ANALYTICS_LINES);
    let pdf = dataset_spec(SEED)
        .files
        .into_iter()
        .find(|f| f.name == "13.pdf");
    let Some(first) = parsed.events.first() else {
        return outcome(false, "no events");
    };
    let size = match first.attributes.get("size") {
        Some(Scalar::Integer(n)) => Some(*n),
        _ => None,
    };
    let table = pdf.map(|f| (f.size, f.bytes.len()));
    let pass = parsed.events.len() == 8
        && parsed.warnings.is_empty()
        && first.event_kind == "file.view.start"
        && size == Some(1695706)
        && table == Some((1695706, 1695706));
    outcome(
        pass,
        format!(
            "{} events, first {} size {size:?}, 13.pdf {table:?}",
            parsed.events.len(),
            first.event_kind
        ),
    )
}

const STATUSES: [RecoveryStatus; 8] = [
    RecoveryStatus::NotObserved,
    RecoveryStatus::EncryptedCacheOnly,
    RecoveryStatus::MetadataOnly,
    RecoveryStatus::PreviewOnly,
    RecoveryStatus::ThumbnailOnly,
    RecoveryStatus::CarvedDeleted,
    RecoveryStatus::RecoveredUnverified,
    RecoveryStatus::RecoveredIntact,
];

fn random_snapshot(rng: &mut ChaCha8Rng) -> AppSnapshot {
    let mut entries = Vec::new();
    for n in 1..=20u32 {
        if !rng.gen_bool(0.6) {
            continue;
        }
        let mut entry = CloudFileEntry::named(format!("{n:02}"));
        if rng.gen_bool(0.3) {
            let h = rng.gen_range(0..2u8);
            entry.hash = Some(
                ContentHash::new(HashAlgorithm::Md5, &format!("{h:x}").repeat(32))
                    .expect("md5 hex"),
            );
        }
        entries.push(SnapshotEntry {
            entry,
            status: STATUSES[rng.gen_range(0..STATUSES.len())],
            objects: vec![],
            sources: vec![],
            download_url: None,
        });
    }
    AppSnapshot {
        identity: AppIdentity::new(Provider::Box, Platform::Android, "1.6.7"),
        account: AccountInfo::default(),
        entries,
        events: vec![],
        artifacts: vec![],
        warnings: vec![],
        notes: vec![],
    }
}

fn merge_triple(t: &[(String, AppSnapshot)], order: [usize; 3]) -> MergedDataset {
    let v: Vec<(String, AppSnapshot)> = order.iter().map(|&i| t[i].clone()).collect();
    merge_snapshots(&v).expect("single provider")
}

fn merge_algebra() -> Outcome {
    const ORDERS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let mut bad = Vec::new();
    for seed in 0..1000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t: Vec<(String, AppSnapshot)> = ["m1", "m2", "m3"]
            .map(|l| (l.to_string(), random_snapshot(&mut rng)))
            .into();
        let union = merge_triple(&t, ORDERS[0]);
        if ORDERS.iter().any(|o| merge_triple(&t, *o) != union) {
            bad.push(format!("seed {seed}: order dependent"));
        }
        let doubled: Vec<(String, AppSnapshot)> = t.iter().chain(t.iter()).cloned().collect();
        if merge_snapshots(&doubled).ok().as_ref() != Some(&union)
            || merge_datasets(&[union.clone(), union.clone()])
                .ok()
                .as_ref()
                != Some(&union)
        {
            bad.push(format!("seed {seed}: not idempotent"));
        }
        let each: Vec<usize> = t
            .iter()
            .map(|s| count_recovered(&merge_snapshots(std::slice::from_ref(s)).unwrap()))
            .collect();
        let u = count_recovered(&union);
        if u < *each.iter().max().unwrap() || u > each.iter().sum() {
            bad.push(format!("seed {seed}: union {u} outside bounds of {each:?}"));
        }
    }
    outcome(
        bad.is_empty(),
        format!("1000 triples, {} violations{}", bad.len(), first_few(&bad)),
    )
}

fn main() -> ExitCode {
    let (runs, errors, elapsed) = run_matrix();
    let checks: Vec<(&str, Outcome)> = vec![
        (
            "1 recovery matrix reproduction",
            matrix(&runs, &errors, elapsed),
        ),
        ("2 per-provider union counts", unions(&runs)),
        ("3 powered-down equivalence", powered_down(&runs)),
        ("4 box download url", box_url()),
        ("5 sqlite reader differential", sqlite_suite()),
        ("6 plist reader differential", plist_suite()),
        ("7 carver round trip", carve_suite()),
        ("8 analytics log parse", analytics_log()),
        ("9 merge algebra", merge_algebra()),
    ];
    let mut failed = 0;
    for (name, o) in &checks {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {name}: {}", o.detail);
        failed += usize::from(!o.pass);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} of {} criteria failed", checks.len());
        ExitCode::FAILURE
    }
}

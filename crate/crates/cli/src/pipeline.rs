//! scan, analyze, carve: evidence in, report out.

use cloudsift::analyzers::{analyze, unlinked_carved, AnalysisContext, KnownSet};
use cloudsift::carver::{builtin_signatures, carve};
use cloudsift::evidence::{EvidenceTree, RawImage};
use cloudsift::locator::{detect_apps, scan, PathSignature};
use cloudsift::model::AppSnapshot;

use crate::report::{InputKind, InputRecord, InputRole, Report, NO_PROVIDERS};

pub const INTERNAL_LABEL: &str = "internal";
pub const SD_LABEL: &str = "sd";
pub const RAW_LABEL: &str = "raw";

const RESIDUE_LIMITATION: &str =
    "carving assumes contiguous residue; fragmented or partially overwritten files are not reassembled";

pub struct Evidence {
    pub internal: EvidenceTree,
    pub sd: Option<EvidenceTree>,
    pub raw: Option<RawImage>,
}

fn snapshot_order(s: &AppSnapshot) -> (&'static str, &'static str, String) {
    (
        s.identity.provider.as_str(),
        s.identity.platform.as_str(),
        s.identity.version.as_str().to_string(),
    )
}

pub fn analyze_evidence(
    ev: &Evidence,
    registry: &[PathSignature],
    known: Option<&KnownSet>,
) -> Report {
    let mut report = Report::default();
    let mut trees: Vec<&EvidenceTree> = vec![&ev.internal];
    trees.extend(ev.sd.as_ref());

    for (role, t) in [
        (InputRole::Internal, Some(&ev.internal)),
        (InputRole::Sd, ev.sd.as_ref()),
    ] {
        let Some(t) = t else { continue };
        match t.digest() {
            Ok(sha1) => report.inputs.push(InputRecord {
                role,
                kind: InputKind::Tree,
                sha1,
            }),
            Err(e) => report.warnings.push(format!("{}: {e}", t.label())),
        }
        report
            .warnings
            .extend(t.warnings().iter().map(|w| format!("{}: {w}", t.label())));
    }

    let mut carved = Vec::new();
    if let Some(raw) = &ev.raw {
        report.inputs.push(InputRecord {
            role: InputRole::Raw,
            kind: InputKind::Image,
            sha1: raw.sha1(),
        });
        let outcome = carve(raw, &builtin_signatures());
        carved = outcome.objects;
        report.notes.extend(outcome.notes);
        report.notes.push(RESIDUE_LIMITATION.to_string());
    }

    let hits = scan(&trees, registry);
    let apps = detect_apps(&hits, registry);
    let ctx = AnalysisContext {
        trees: &trees,
        carved: &carved,
        known,
    };
    let mut snapshots: Vec<AppSnapshot> = apps.iter().map(|a| analyze(a, &ctx)).collect();
    snapshots.sort_by_key(snapshot_order);

    report.unlinked_carved = unlinked_carved(&carved, &snapshots)
        .into_iter()
        .cloned()
        .collect();
    if snapshots.is_empty() {
        report.warnings.push(NO_PROVIDERS.to_string());
    }
    report.snapshots = snapshots;
    report.inputs.sort();
    report
}

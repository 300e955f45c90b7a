use cloudsift::analyzers::{analyze, AnalysisContext};
use cloudsift::carver::{builtin_signatures, carve};
use cloudsift::evidence::EvidenceTree;
use cloudsift::locator::{builtin_registry, detect_apps, scan};
use cloudsift::model::{AppIdentity, AppSnapshot, DeviceState, TableMark};
use cloudsift_corpus::{dataset_spec, generate, known_set, Generated, Scenario};

const SEED: u64 = 20_130_101;

fn analyze_generated(
    g: &Generated,
    with_known: bool,
    known: &cloudsift::analyzers::KnownSet,
) -> Vec<AppSnapshot> {
    let mut trees: Vec<&EvidenceTree> = vec![&g.internal];
    trees.extend(g.sd.as_ref());
    let carved = g
        .raw
        .as_ref()
        .map(|r| carve(r, &builtin_signatures()).objects)
        .unwrap_or_default();
    let reg = builtin_registry();
    let hits = scan(&trees, &reg);
    let apps = detect_apps(&hits, &reg);
    let ctx = AnalysisContext {
        trees: &trees,
        carved: &carved,
        known: with_known.then_some(known),
    };
    apps.iter().map(|a| analyze(a, &ctx)).collect()
}

/// Builds that share every path are reported without a version; the true
/// version must then be among the candidates.
fn is_snapshot_of(s: &AppSnapshot, id: &AppIdentity) -> bool {
    s.identity == *id
        || (s.identity.provider == id.provider
            && s.identity.platform == id.platform
            && s.identity.version.is_unknown()
            && id.sibling_versions().contains(&id.version.as_str()))
}

fn marks(s: &AppSnapshot, names: &[String]) -> Vec<TableMark> {
    names
        .iter()
        .map(|n| {
            s.entries
                .iter()
                .find(|e| &e.entry.name == n)
                .map_or(TableMark::Blank, |e| e.status.table_mark())
        })
        .collect()
}

fn render(m: &[TableMark]) -> String {
    m.iter().map(|m| m.symbol()).collect()
}

#[test]
fn every_scenario_reproduces_its_expected_row() {
    let data = dataset_spec(SEED);
    let known = known_set(&data);
    let names: Vec<String> = data.files.iter().map(|f| f.name.clone()).collect();
    let mut failures = Vec::new();
    for id in AppIdentity::all_cataloged() {
        for state in DeviceState::ALL {
            let g = generate(
                &Scenario {
                    identity: id.clone(),
                    state,
                    seed: SEED,
                },
                &data,
            )
            .unwrap();
            let snaps = analyze_generated(&g, true, &known);
            let detected: Vec<String> = snaps.iter().map(|s| s.identity.to_string()).collect();
            let Some(s) = snaps.iter().find(|s| is_snapshot_of(s, &id)) else {
                failures.push(format!("{id} {state:?}: not detected, got {detected:?}"));
                continue;
            };
            if snaps.len() != 1 {
                failures.push(format!("{id} {state:?}: extra detections {detected:?}"));
            }
            let want: Vec<TableMark> = g.manifest.expected.iter().map(|e| e.mark).collect();
            let got = marks(s, &names);
            if got != want {
                failures.push(format!(
                    "{id} {state:?}:\n  want [{}]\n  got  [{}]",
                    render(&want),
                    render(&got)
                ));
            }
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn expected_artifacts_are_located() {
    let data = dataset_spec(SEED);
    let reg = builtin_registry();
    for id in AppIdentity::all_cataloged() {
        for state in [DeviceState::ActivePowerState, DeviceState::CacheCleared] {
            let g = generate(
                &Scenario {
                    identity: id.clone(),
                    state,
                    seed: SEED,
                },
                &data,
            )
            .unwrap();
            let mut trees: Vec<&EvidenceTree> = vec![&g.internal];
            trees.extend(g.sd.as_ref());
            let hits = scan(&trees, &reg);
            for a in &g.manifest.artifacts {
                assert!(
                    hits.iter().any(|h| h.tree == a.tree
                        && h.resolved_path == a.path
                        && h.signature.role == a.role
                        && h.signature.identity() == id),
                    "{id} {state:?}: {a:?} not located"
                );
            }
        }
    }
}

#[test]
fn residue_offsets_point_at_content() {
    let data = dataset_spec(SEED);
    for id in AppIdentity::all_cataloged() {
        let g = generate(
            &Scenario {
                identity: id.clone(),
                state: DeviceState::CacheCleared,
                seed: SEED,
            },
            &data,
        )
        .unwrap();
        let Some(raw) = &g.raw else { continue };
        for r in &g.manifest.carve_offsets {
            let f = data.files.iter().find(|f| f.name == r.name).unwrap();
            let want = match r.rendition {
                cloudsift::model::Rendition::Thumbnail => f.thumbnail.clone().unwrap(),
                _ => f.bytes.clone(),
            };
            assert_eq!(
                raw.slice(r.offset, r.length).unwrap(),
                &want[..],
                "{id} {}",
                r.name
            );
        }
    }
}

#[test]
fn power_state_does_not_change_evidence() {
    let data = dataset_spec(SEED);
    for id in AppIdentity::all_cataloged() {
        for (on, off) in [
            (DeviceState::ActivePowerState, DeviceState::PoweredDown),
            (
                DeviceState::CacheCleared,
                DeviceState::CacheClearedPoweredDown,
            ),
        ] {
            let a = generate(
                &Scenario {
                    identity: id.clone(),
                    state: on,
                    seed: SEED,
                },
                &data,
            )
            .unwrap();
            let b = generate(
                &Scenario {
                    identity: id.clone(),
                    state: off,
                    seed: SEED,
                },
                &data,
            )
            .unwrap();
            assert_eq!(
                a.internal.digest().unwrap(),
                b.internal.digest().unwrap(),
                "{id}"
            );
            assert_eq!(
                a.sd.map(|t| t.digest().unwrap()),
                b.sd.map(|t| t.digest().unwrap()),
                "{id}"
            );
            assert_eq!(a.raw.map(|r| r.sha1()), b.raw.map(|r| r.sha1()), "{id}");
        }
    }
}

#[test]
fn generation_is_deterministic() {
    let data = dataset_spec(SEED);
    let id = AppIdentity::all_cataloged().remove(0);
    let s = Scenario {
        identity: id,
        state: DeviceState::CacheCleared,
        seed: 9,
    };
    let a = generate(&s, &data).unwrap();
    let b = generate(&s, &data).unwrap();
    assert_eq!(a.manifest, b.manifest);
    assert_eq!(a.internal.digest().unwrap(), b.internal.digest().unwrap());
    assert_eq!(a.raw.map(|r| r.sha1()), b.raw.map(|r| r.sha1()));
}

#[test]
fn uncataloged_identity_is_rejected() {
    let data = dataset_spec(SEED);
    let id = AppIdentity::new(
        cloudsift::model::Provider::Dropbox,
        cloudsift::model::Platform::Android,
        "9.9",
    );
    assert!(generate(
        &Scenario {
            identity: id,
            state: DeviceState::ActivePowerState,
            seed: 1
        },
        &data
    )
    .is_err());
}

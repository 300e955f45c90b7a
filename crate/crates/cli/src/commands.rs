//! Subcommands of the `cloudsift` binary.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use cloudsift::analyzers::{reconstruct_box_url, KnownSet};
use cloudsift::carver::{builtin_signatures, carve};
use cloudsift::evidence::{EvidenceTree, RawImage};
use cloudsift::hashing::sha1_hex;
use cloudsift::locator::{builtin_registry, registry_from_json, registry_to_json, PathSignature};
use cloudsift::merge::merge_snapshots;
use cloudsift::model::{AppIdentity, AppSnapshot, DeviceState, Platform, Provider};
use cloudsift_corpus::{dataset_spec, generate, write_scenario, Scenario};
use serde::Serialize;

use crate::pipeline::{analyze_evidence, Evidence, INTERNAL_LABEL, RAW_LABEL, SD_LABEL};
use crate::report::{InputKind, InputRecord, InputRole, Report, RunInfo};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FATAL: u8 = 1;
pub const EXIT_PARTIAL: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "cloudsift",
    version,
    about = "Recover cloud-storage client artifacts from mobile device extractions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Locate, parse and classify artifacts in extracted evidence.
    Analyze(AnalyzeArgs),
    /// Union the snapshots of several device reports, per provider.
    Merge(MergeArgs),
    /// Carve known file types out of a raw image.
    Carve(CarveArgs),
    /// Generate a synthetic device extraction for one application build.
    GenCorpus(GenCorpusArgs),
    /// Print the Box direct-download link for a file id.
    BoxUrl(BoxUrlArgs),
    /// Artifact location registry.
    Registry {
        #[command(subcommand)]
        action: RegistryAction,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Internal storage: a directory or a tar archive.
    #[arg(long)]
    pub internal: PathBuf,
    /// SD card: a directory or a tar archive.
    #[arg(long)]
    pub sd: Option<PathBuf>,
    /// Raw image of unallocated space to carve.
    #[arg(long)]
    pub raw: Option<PathBuf>,
    /// Registry JSON replacing the built-in locations.
    #[arg(long, env = "CLOUDSIFT_REGISTRY")]
    pub registry: Option<PathBuf>,
    /// Reference hashes (known_files.json) for linking carved content.
    #[arg(long)]
    pub known: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct MergeArgs {
    /// Reports to merge; each file stem labels its device.
    #[arg(required = true, num_args = 2..)]
    pub reports: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct CarveArgs {
    pub image: PathBuf,
    /// Directory for carved files and manifest.json.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GenCorpusArgs {
    #[arg(long)]
    pub provider: Provider,
    #[arg(long)]
    pub platform: Platform,
    #[arg(long)]
    pub app_version: String,
    /// aps, cc, pwd or cc&pwd.
    #[arg(long, default_value = "aps")]
    pub state: DeviceState,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BoxUrlArgs {
    #[arg(long)]
    pub token: String,
    /// The file's mId.
    #[arg(long)]
    pub id: String,
}

#[derive(Debug, Subcommand)]
pub enum RegistryAction {
    /// Write the built-in registry as JSON.
    Export {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

pub fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Analyze(a) => cmd_analyze(&a),
        Command::Merge(a) => cmd_merge(&a),
        Command::Carve(a) => cmd_carve(&a),
        Command::GenCorpus(a) => cmd_gen_corpus(&a),
        Command::BoxUrl(a) => {
            println!("{}", reconstruct_box_url(&a.token, &a.id)?);
            Ok(EXIT_OK)
        }
        Command::Registry {
            action: RegistryAction::Export { out },
        } => {
            let json = registry_to_json(&builtin_registry());
            match out {
                Some(p) => {
                    std::fs::write(&p, json).with_context(|| format!("writing {}", p.display()))?
                }
                None => print!("{json}"),
            }
            Ok(EXIT_OK)
        }
    }
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).with_context(|| format!("reading {}", path.display()))
}

pub fn load_registry(path: Option<&Path>) -> Result<(Vec<PathSignature>, Option<String>)> {
    match path {
        None => Ok((builtin_registry(), None)),
        Some(p) => {
            let bytes = read(p)?;
            let text = String::from_utf8(bytes.clone())
                .with_context(|| format!("{} is not UTF-8", p.display()))?;
            let reg =
                registry_from_json(&text).with_context(|| format!("registry {}", p.display()))?;
            Ok((reg, Some(sha1_hex(&bytes))))
        }
    }
}

fn write_report(report: &Report, out: &Path, format: Format) -> Result<()> {
    let body = match format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    };
    std::fs::write(out, body).with_context(|| format!("writing {}", out.display()))
}

fn exit_for(report: &Report) -> u8 {
    if report.is_partial() {
        EXIT_PARTIAL
    } else {
        EXIT_OK
    }
}

fn display(p: &Path) -> String {
    p.display().to_string()
}

pub fn cmd_analyze(a: &AnalyzeArgs) -> Result<u8> {
    let started_at = now();
    let (registry, registry_sha1) = load_registry(a.registry.as_deref())?;
    let known = match &a.known {
        Some(p) => {
            let bytes = read(p)?;
            let set: KnownSet = serde_json::from_slice(&bytes)
                .with_context(|| format!("known set {}", p.display()))?;
            Some((set, sha1_hex(&bytes)))
        }
        None => None,
    };
    let internal = EvidenceTree::open(&a.internal, INTERNAL_LABEL)
        .with_context(|| format!("opening {}", a.internal.display()))?;
    let sd =
        a.sd.as_ref()
            .map(|p| {
                EvidenceTree::open(p, SD_LABEL).with_context(|| format!("opening {}", p.display()))
            })
            .transpose()?;
    let raw = a
        .raw
        .as_ref()
        .map(|p| RawImage::open(p, RAW_LABEL).with_context(|| format!("opening {}", p.display())))
        .transpose()?;

    let ev = Evidence { internal, sd, raw };
    let mut report = analyze_evidence(&ev, &registry, known.as_ref().map(|k| &k.0));
    if let Some(sha1) = registry_sha1 {
        report.inputs.push(InputRecord {
            role: InputRole::Registry,
            kind: InputKind::File,
            sha1,
        });
    }
    if let Some((_, sha1)) = known {
        report.inputs.push(InputRecord {
            role: InputRole::Known,
            kind: InputKind::File,
            sha1,
        });
    }
    report.inputs.sort();

    let mut paths = BTreeMap::new();
    paths.insert("internal".to_string(), display(&a.internal));
    for (k, v) in [
        ("sd", &a.sd),
        ("raw", &a.raw),
        ("registry", &a.registry),
        ("known", &a.known),
    ] {
        if let Some(p) = v {
            paths.insert(k.to_string(), display(p));
        }
    }
    report.run = Some(RunInfo {
        started_at,
        command: "analyze".to_string(),
        paths,
    });
    write_report(&report, &a.out, a.format)?;
    Ok(exit_for(&report))
}

fn device_label(path: &Path) -> String {
    path.file_stem()
        .map_or_else(|| display(path), |s| s.to_string_lossy().into_owned())
}

/// Merges the snapshots of the given (label, report) pairs per provider.
pub fn merge_reports(labeled: &[(String, Report)]) -> Result<Report> {
    let mut by_provider: BTreeMap<Provider, Vec<(String, AppSnapshot)>> = BTreeMap::new();
    let mut labels = std::collections::BTreeSet::new();
    for (label, r) in labeled {
        if !labels.insert(label.clone()) {
            bail!("duplicate device label `{label}`; rename the report files");
        }
        let per_provider = |p: Provider| {
            r.snapshots
                .iter()
                .filter(|s| s.identity.provider == p)
                .count()
        };
        for s in &r.snapshots {
            // A device carrying two builds of one provider gets one label per build.
            let device = if per_provider(s.identity.provider) > 1 {
                format!("{label}:{}", s.identity)
            } else {
                label.clone()
            };
            by_provider
                .entry(s.identity.provider)
                .or_default()
                .push((device, s.clone()));
        }
    }
    let mut out = Report::default();
    for (provider, snaps) in by_provider {
        let merged = merge_snapshots(&snaps)?;
        for item in &merged.items {
            for c in &item.conflicts {
                out.warnings
                    .push(format!("{provider}: {}: {c}", item.key.name));
            }
        }
        out.merged.push(merged);
    }
    if out.merged.is_empty() {
        out.warnings.push(crate::report::NO_PROVIDERS.to_string());
    }
    Ok(out)
}

pub fn cmd_merge(a: &MergeArgs) -> Result<u8> {
    let started_at = now();
    let mut labeled = Vec::new();
    let mut inputs = Vec::new();
    let mut paths = BTreeMap::new();
    for p in &a.reports {
        let bytes = read(p)?;
        let text = String::from_utf8(bytes.clone())
            .with_context(|| format!("{} is not UTF-8", p.display()))?;
        let r = Report::from_json(&text).with_context(|| format!("report {}", p.display()))?;
        let label = device_label(p);
        inputs.push(InputRecord {
            role: InputRole::Report,
            kind: InputKind::File,
            sha1: sha1_hex(&bytes),
        });
        paths.insert(label.clone(), display(p));
        labeled.push((label, r));
    }
    let mut report = merge_reports(&labeled)?;
    inputs.sort();
    report.inputs = inputs;
    report.run = Some(RunInfo {
        started_at,
        command: "merge".to_string(),
        paths,
    });
    write_report(&report, &a.out, a.format)?;
    Ok(exit_for(&report))
}

#[derive(Debug, Serialize)]
struct CarvedRecord {
    file: String,
    offset: u64,
    length: u64,
    #[serde(rename = "type")]
    file_type: String,
    md5: String,
    sha1: String,
}

#[derive(Debug, Serialize)]
struct CarveManifest {
    image_sha1: String,
    objects: Vec<CarvedRecord>,
    notes: Vec<String>,
}

fn extension(label: &str) -> &str {
    match label {
        "jpeg" => "jpg",
        "zip" => "zip",
        other => other,
    }
}

pub fn cmd_carve(a: &CarveArgs) -> Result<u8> {
    let image = RawImage::open(&a.image, RAW_LABEL)
        .with_context(|| format!("opening {}", a.image.display()))?;
    std::fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let outcome = carve(&image, &builtin_signatures());
    let mut objects = Vec::new();
    for o in &outcome.objects {
        let cloudsift::model::ObjectOrigin::CarvedAtOffset(offset) = o.origin else {
            continue;
        };
        let Some(bytes) = image.slice(offset, o.length) else {
            bail!("carved extent {}+{} outside image", offset, o.length);
        };
        let file_type = o
            .logical_name
            .split('_')
            .next()
            .unwrap_or("bin")
            .to_string();
        let file = format!("{}.{}", o.logical_name, extension(&file_type));
        std::fs::write(a.out.join(&file), bytes)?;
        objects.push(CarvedRecord {
            file,
            offset,
            length: o.length,
            file_type,
            md5: o.md5.clone(),
            sha1: o.sha1.clone(),
        });
    }
    let manifest = CarveManifest {
        image_sha1: image.sha1(),
        objects,
        notes: outcome.notes,
    };
    std::fs::write(
        a.out.join("manifest.json"),
        serde_json::to_string_pretty(&manifest)? + "\n",
    )?;
    Ok(EXIT_OK)
}

pub fn cmd_gen_corpus(a: &GenCorpusArgs) -> Result<u8> {
    let identity = AppIdentity::checked(a.provider, a.platform, &a.app_version)?;
    if !identity.is_cataloged() {
        bail!("{identity} is not a cataloged build");
    }
    let data = dataset_spec(a.seed);
    let scenario = Scenario {
        identity,
        state: a.state,
        seed: a.seed,
    };
    let g = generate(&scenario, &data)?;
    write_scenario(&g, &data, &a.out)?;
    Ok(EXIT_OK)
}

//! On-disk layout of a campaign and the plots regenerated from it.
//!
//! ```text
//! <dir>/campaign.json       manifest; `complete` flips to true once everything is written
//! <dir>/trials.csv          one row per trial, in ask order
//! <dir>/pareto.json         front members with genotypes, objectives and IK angles
//! <dir>/hypervolume.csv     front hypervolume after every trial
//! <dir>/urdf/front_<id>.urdf
//! <dir>/scatter.svg
//! <dir>/skeleton_<id>.svg   each front design at its IK pose for every target
//! ```
//!
//! `trials.csv` columns: `id`, `seed` (seed of the sampler draw for that
//! trial), the flattened genotype (`a_x`, `a_y`, `a_z`, then per joint
//! `jN_orientation`, `jN_direction`, `jN_length` or `jN_connection`), `e_x`,
//! `e_tau`, `feasible`, `rank` (nondomination rank over the whole history).

use std::collections::BTreeSet;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use morphsynth_core::design_space::decode;
use morphsynth_core::design_space::urdf::{export_urdf, parse_urdf};
use morphsynth_core::evaluation::TargetDiagnostics;
use morphsynth_core::kinematics::forward_kinematics;
use morphsynth_core::{seed, Genotype, IkOptions};
use serde::{Deserialize, Serialize};

use crate::campaign::Campaign;
use crate::error::{CliError, Result};
use crate::svg::{self, ScatterPoint};

pub const MANIFEST: &str = "campaign.json";
pub const TRIALS: &str = "trials.csv";
pub const PARETO: &str = "pareto.json";
pub const HYPERVOLUME: &str = "hypervolume.csv";
pub const SCATTER: &str = "scatter.svg";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub label: String,
    pub n_joint: usize,
    pub trials: usize,
    pub seed: u64,
    pub complete: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontMember {
    pub id: usize,
    pub genotype: Genotype,
    pub e_x: f64,
    pub e_tau: f64,
    /// Path of the member's URDF, relative to the campaign directory.
    pub urdf: String,
    pub per_target: Vec<TargetDiagnostics>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoSnapshot {
    pub label: String,
    pub n_joint: usize,
    pub seed: u64,
    /// Options the objectives were computed with; re-evaluation must reuse them.
    pub ik: IkOptions,
    pub reference_point: Option<[f64; 2]>,
    pub targets: Vec<[f64; 3]>,
    /// Sorted by increasing `e_x`; empty when no design was feasible.
    pub members: Vec<FrontMember>,
}

/// Writes `contents` to a temporary file next to `path` and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(contents).map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|e| CliError::io(path, e))
}

fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("serializable");
    out.push(b'\n');
    out
}

pub fn urdf_name(id: usize) -> String {
    format!("urdf/front_{id:05}.urdf")
}

fn skeleton_name(id: usize) -> String {
    format!("skeleton_{id:05}.svg")
}

/// `trials.csv` of a finished campaign.
pub fn trials_csv(campaign: &Campaign) -> Vec<u8> {
    let space = campaign.space();
    let specs = space.param_specs();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["id".to_string(), "seed".into()];
    header.extend(space.param_names());
    header.extend(["e_x", "e_tau", "feasible", "rank"].map(String::from));
    w.write_record(&header).expect("in-memory write");
    for t in campaign.study.study.trials() {
        let mut row = vec![t.id.to_string(), seed::derive(campaign.seed, t.id as u64).to_string()];
        for (v, spec) in t.params.iter().zip(&specs) {
            row.push(match spec {
                morphsynth_core::optimizer::ParamSpec::Categorical { .. } => (*v as usize).to_string(),
                morphsynth_core::optimizer::ParamSpec::Continuous { .. } => v.to_string(),
            });
        }
        row.push(t.objectives.e_x.to_string());
        row.push(t.objectives.e_tau.to_string());
        row.push(t.objectives.feasible.to_string());
        row.push(t.rank.to_string());
        w.write_record(&row).expect("in-memory write");
    }
    w.into_inner().expect("in-memory write")
}

fn hypervolume_csv(campaign: &Campaign) -> Vec<u8> {
    let study = &campaign.study.study;
    let curve = study
        .reference_point()
        .map(|r| study.hypervolume_curve(r))
        .unwrap_or_else(|| vec![0.0; study.trials().len()]);
    let mut out = String::from("trial,hypervolume\n");
    for (i, hv) in curve.iter().enumerate() {
        out.push_str(&format!("{i},{hv}\n"));
    }
    out.into_bytes()
}

/// The front of a finished campaign as written to `pareto.json`.
pub fn pareto_snapshot(campaign: &Campaign) -> ParetoSnapshot {
    let study = &campaign.study;
    let members = study
        .study
        .pareto_front()
        .map(|front| {
            front
                .members
                .iter()
                .map(|t| FrontMember {
                    id: t.id,
                    genotype: Genotype::from_params(&study.space, &t.params)
                        .expect("trial params match the layout"),
                    e_x: t.objectives.e_x,
                    e_tau: t.objectives.e_tau,
                    urdf: urdf_name(t.id),
                    per_target: t.objectives.per_target.clone(),
                })
                .collect()
        })
        .unwrap_or_default();
    ParetoSnapshot {
        label: campaign.targets.label.clone(),
        n_joint: study.space.n_joint,
        seed: campaign.seed,
        ik: campaign.ik.clone(),
        reference_point: study.study.reference_point(),
        targets: campaign
            .targets
            .targets
            .iter()
            .map(|t| t.position.into())
            .collect(),
        members,
    }
}

fn remove_stale(dir: &Path) -> Result<()> {
    let urdf = dir.join("urdf");
    if urdf.is_dir() {
        std::fs::remove_dir_all(&urdf).map_err(|e| CliError::io(&urdf, e))?;
    }
    for entry in std::fs::read_dir(dir).map_err(|e| CliError::io(dir, e))? {
        let path = entry.map_err(|e| CliError::io(dir, e))?.path();
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
        if name.starts_with("skeleton_") && name.ends_with(".svg") {
            std::fs::remove_file(&path).map_err(|e| CliError::io(&path, e))?;
        }
    }
    Ok(())
}

/// Writes every artifact of `campaign` into `dir`, then renders the plots.
pub fn write_campaign(dir: &Path, campaign: &Campaign) -> Result<()> {
    create_dir(dir)?;
    let mut manifest = Manifest {
        label: campaign.targets.label.clone(),
        n_joint: campaign.space().n_joint,
        trials: campaign.study.study.trials().len(),
        seed: campaign.seed,
        complete: false,
    };
    write_atomic(&dir.join(MANIFEST), &to_json(&manifest))?;
    remove_stale(dir)?;
    create_dir(&dir.join("urdf"))?;

    write_atomic(&dir.join(TRIALS), &trials_csv(campaign))?;
    write_atomic(&dir.join(HYPERVOLUME), &hypervolume_csv(campaign))?;
    let snapshot = pareto_snapshot(campaign);
    for m in &snapshot.members {
        let model = decode(campaign.space(), &m.genotype).expect("front genotypes decode");
        let doc = export_urdf(&model, &format!("front_{:05}", m.id));
        write_atomic(&dir.join(&m.urdf), doc.as_bytes())?;
    }
    write_atomic(&dir.join(PARETO), &to_json(&snapshot))?;
    render_campaign(dir, &snapshot)?;

    manifest.complete = true;
    write_atomic(&dir.join(MANIFEST), &to_json(&manifest))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::State(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::State(format!("{}: {e}", path.display())))
}

/// Objectives of every feasible trial, read back from `trials.csv`.
fn read_feasible_objectives(path: &Path) -> Result<Vec<(usize, f64, f64)>> {
    let state = |m: String| CliError::State(format!("{}: {m}", path.display()));
    let mut reader = csv::Reader::from_path(path).map_err(|e| state(e.to_string()))?;
    let headers = reader.headers().map_err(|e| state(e.to_string()))?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| state(format!("missing column `{name}`")))
    };
    let (id, e_x, e_tau, feasible) = (column("id")?, column("e_x")?, column("e_tau")?, column("feasible")?);
    let mut out = Vec::new();
    for record in reader.records() {
        let r = record.map_err(|e| state(e.to_string()))?;
        let field = |k: usize| r.get(k).unwrap_or("");
        if field(feasible) != "true" {
            continue;
        }
        let parse = |k: usize| -> Result<f64> {
            field(k)
                .parse()
                .map_err(|_| state(format!("bad number `{}`", field(k))))
        };
        let id: usize = field(id)
            .parse()
            .map_err(|_| state(format!("bad id `{}`", field(id))))?;
        out.push((id, parse(e_x)?, parse(e_tau)?));
    }
    Ok(out)
}

/// What [`render_campaign`] produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Rendered {
    pub scatter: PathBuf,
    pub skeletons: Vec<PathBuf>,
}

/// Draws the scatter and skeleton plots of a campaign directory from its logs.
pub fn render_campaign(dir: &Path, snapshot: &ParetoSnapshot) -> Result<Rendered> {
    let front: BTreeSet<usize> = snapshot.members.iter().map(|m| m.id).collect();
    let points: Vec<ScatterPoint> = read_feasible_objectives(&dir.join(TRIALS))?
        .into_iter()
        .map(|(id, e_x, e_tau)| ScatterPoint {
            id,
            e_x,
            e_tau,
            front: front.contains(&id),
        })
        .collect();
    if snapshot.members.is_empty() {
        log::warn!("{}: no feasible design, the front is empty", dir.display());
    }
    let title = format!("{} (N_joint = {})", snapshot.label, snapshot.n_joint);
    let scatter = dir.join(SCATTER);
    write_atomic(&scatter, svg::scatter(&title, &points).as_bytes())?;

    let mut skeletons = Vec::new();
    for m in &snapshot.members {
        let urdf_path = dir.join(&m.urdf);
        let text = std::fs::read_to_string(&urdf_path)
            .map_err(|e| CliError::State(format!("{}: {e}", urdf_path.display())))?;
        let model = parse_urdf(&text)
            .map_err(|e| CliError::State(format!("{}: {e}", urdf_path.display())))?;
        let mut poses = Vec::new();
        for t in &m.per_target {
            let frames = forward_kinematics(&model, &t.angles)
                .map_err(|e| CliError::State(format!("trial {}: {e}", m.id)))?;
            let mut pts: Vec<[f64; 3]> = frames.origins.iter().map(|p| (*p).into()).collect();
            pts.push(frames.tip.into());
            poses.push(pts);
        }
        let title = format!(
            "trial {}: E_x = {:.4} m, E_tau = {:.4} N m",
            m.id, m.e_x, m.e_tau
        );
        let path = dir.join(skeleton_name(m.id));
        write_atomic(&path, svg::skeleton(&title, &poses, &snapshot.targets).as_bytes())?;
        skeletons.push(path);
    }
    Ok(Rendered { scatter, skeletons })
}

/// Campaign directories under `dir`: `dir` itself if it holds a manifest,
/// otherwise its immediate subdirectories that do, in name order.
pub fn campaign_dirs(dir: &Path) -> Result<Vec<PathBuf>> {
    if dir.join(MANIFEST).is_file() {
        return Ok(vec![dir.to_path_buf()]);
    }
    let entries = std::fs::read_dir(dir)
        .map_err(|e| CliError::State(format!("{}: {e}", dir.display())))?;
    let mut dirs: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.join(MANIFEST).is_file())
        .collect();
    dirs.sort();
    if dirs.is_empty() {
        return Err(CliError::State(format!(
            "{}: no campaign found (missing {MANIFEST})",
            dir.display()
        )));
    }
    Ok(dirs)
}

/// Regenerates the plots of every completed campaign under `dir`.
pub fn render_report(dir: &Path) -> Result<Vec<Rendered>> {
    let mut out = Vec::new();
    for d in campaign_dirs(dir)? {
        let manifest: Manifest = read_json(&d.join(MANIFEST))?;
        if !manifest.complete {
            return Err(CliError::State(format!(
                "{}: campaign is incomplete",
                d.display()
            )));
        }
        let snapshot: ParetoSnapshot = read_json(&d.join(PARETO))?;
        out.push(render_campaign(&d, &snapshot)?);
    }
    Ok(out)
}

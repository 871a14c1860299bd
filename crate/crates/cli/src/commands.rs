use std::path::{Path, PathBuf};

use morphsynth_core::design_space::urdf::{export_urdf, parse_urdf};
use morphsynth_core::design_space::{decode, validate_genotype, BaseRange};
use morphsynth_core::evaluation::{evaluate, TargetDiagnostics};
use morphsynth_core::{Genotype, IkOptions, TargetSet};
use serde::{Deserialize, Serialize};

use crate::artifacts::{self, write_atomic, Rendered};
use crate::campaign::run_campaign;
use crate::config::{load_space, load_target_file, CampaignConfig};
use crate::error::{read_input, CliError, Result};

/// Runs `f` on a pool of `jobs` threads (all cores when `None`).
pub fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Input(format!("--jobs: {e}")))?;
    Ok(pool.install(f))
}

#[derive(Debug, Clone, Default)]
pub struct OptimizeOverrides {
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CampaignSummary {
    pub n_joint: usize,
    pub dir: PathBuf,
    pub trials: usize,
    pub feasible: usize,
    pub front_size: usize,
    pub best_e_x: Option<f64>,
    pub hypervolume: f64,
}

/// Directory of the campaign with `n_joint` joints under `out`.
pub fn campaign_dir(out: &Path, n_joint: usize) -> PathBuf {
    out.join(format!("nj{n_joint}"))
}

/// Runs every campaign of the sweep and writes its artifacts.
pub fn optimize(config_path: &Path, overrides: &OptimizeOverrides) -> Result<Vec<CampaignSummary>> {
    let mut config = CampaignConfig::load(config_path)?;
    if let Some(seed) = overrides.seed {
        config.seed = seed;
    }
    if let Some(trials) = overrides.trials {
        if trials == 0 {
            return Err(CliError::Input("--trials: must be at least 1".into()));
        }
        config.trials = trials;
    }
    if let Some(out) = &overrides.out {
        config.out = out.clone();
    }
    let mut summaries = Vec::new();
    for &n_joint in &config.n_joint {
        let space = config
            .search_space(n_joint)
            .map_err(|m| CliError::input(config_path, m))?;
        log::info!(
            "campaign n_joint={n_joint}: {} trials, seed {}",
            config.trials,
            config.seed
        );
        let campaign = run_campaign(space, &config.targets, config.trials, config.sampler(), &config.ik);
        let dir = campaign_dir(&config.out, n_joint);
        artifacts::write_campaign(&dir, &campaign)?;
        let trials = campaign.study.study.trials();
        let summary = CampaignSummary {
            n_joint,
            dir,
            trials: trials.len(),
            feasible: trials.iter().filter(|t| t.objectives.feasible).count(),
            front_size: campaign
                .study
                .study
                .pareto_front()
                .map_or(0, |f| f.members.len()),
            best_e_x: campaign.best_e_x(),
            hypervolume: campaign.final_hypervolume(),
        };
        log::info!(
            "campaign n_joint={n_joint}: {} feasible, front of {}, written to {}",
            summary.feasible,
            summary.front_size,
            summary.dir.display()
        );
        summaries.push(summary);
    }
    Ok(summaries)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub targets: Vec<TargetDiagnostics>,
    pub e_x: f64,
    pub e_tau: f64,
}

#[derive(Deserialize)]
struct IkSection {
    #[serde(default)]
    ik: IkOptions,
}

/// Inverse-kinematics options from the `[ik]` table of a campaign file.
pub fn load_ik_options(path: &Path) -> Result<IkOptions> {
    let section: IkSection =
        toml::from_str(&read_input(path)?).map_err(|e| CliError::input(path, e))?;
    Ok(section.ik)
}

/// Scores a URDF model against a target set.
pub fn evaluate_model(model_path: &Path, targets: &TargetSet, ik: &IkOptions) -> Result<EvaluationReport> {
    let model = parse_urdf(&read_input(model_path)?).map_err(|e| CliError::input(model_path, e))?;
    let objectives = evaluate(&model, targets, ik);
    Ok(EvaluationReport {
        targets: objectives.per_target,
        e_x: objectives.e_x,
        e_tau: objectives.e_tau,
    })
}

pub fn evaluate_files(model_path: &Path, targets_path: &Path, ik: &IkOptions) -> Result<EvaluationReport> {
    let targets = load_target_file(targets_path)?;
    evaluate_model(model_path, &targets, ik)
}

/// Human-readable form of an evaluation.
pub fn format_report(report: &EvaluationReport) -> String {
    let mut out = String::from("target\tposition_error\ttorque_norm\tconverged\n");
    for (i, t) in report.targets.iter().enumerate() {
        out.push_str(&format!(
            "{i}\t{}\t{}\t{}\n",
            t.position_error, t.torque_norm, t.converged
        ));
    }
    out.push_str(&format!("E_x = {}\nE_tau = {}\n", report.e_x, report.e_tau));
    out
}

/// URDF of a genotype given as JSON, e.g.
/// `{"base_offset": [0, 0, 0], "joints": [{"orientation": 4, "direction": 4, "length": 0.3}]}`.
pub fn export_genotype(space_path: &Path, genotype_path: &Path, name: &str) -> Result<String> {
    let mut space_config = load_space(space_path)?;
    let genotype: Genotype = serde_json::from_str(&read_input(genotype_path)?)
        .map_err(|e| CliError::input(genotype_path, e))?;
    space_config.n_joint = Some(genotype.joints.len());
    let dir = space_path.parent().unwrap_or(Path::new("."));
    let space = space_config
        .build(dir, BaseRange::default())
        .map_err(|e| CliError::input(space_path, e))?;
    let model = decode(&space, &genotype).map_err(|e| CliError::input(genotype_path, e))?;
    let report = validate_genotype(&space, &genotype);
    if !report.feasible() {
        log::warn!(
            "{}: design is infeasible: {:?}",
            genotype_path.display(),
            report.violations
        );
    }
    Ok(export_urdf(&model, name))
}

pub fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn report(dir: &Path) -> Result<Vec<Rendered>> {
    artifacts::render_report(dir)
}

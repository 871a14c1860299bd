//! Campaign configuration files.
//!
//! ```toml
//! space = "space.toml"        # search-space file, relative to this file
//! targets = "targets.toml"    # target-set file, relative to this file
//! trials = 2000
//! seed = 7
//! n_joint = [2, 3, 4]         # one campaign per entry; defaults to the space's n_joint
//! out = "out"                 # relative to this file; default `out/<file stem>`
//!                             # under the working directory
//!
//! [ik]                        # overrides of the inverse-kinematics options
//! restarts = 10
//!
//! [sampler]                   # overrides of the sampler constants
//! n_startup = 50
//! ```

use std::path::{Path, PathBuf};

use morphsynth_core::design_space::SpaceConfig;
use morphsynth_core::evaluation::load_targets;
use morphsynth_core::optimizer::SamplerConfig;
use morphsynth_core::{IkOptions, SearchSpace, TargetSet};
use serde::Deserialize;

use crate::error::{read_input, CliError, Result};

fn default_trials() -> usize {
    2000
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CampaignFile {
    space: PathBuf,
    targets: PathBuf,
    #[serde(default = "default_trials")]
    trials: usize,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    n_joint: Vec<usize>,
    #[serde(default)]
    out: Option<PathBuf>,
    #[serde(default)]
    ik: IkOptions,
    #[serde(default)]
    sampler: SamplerConfig,
}

#[derive(Debug, Clone)]
pub struct CampaignConfig {
    pub space: SpaceConfig,
    /// Directory the space file lives in, for resolving its relative paths.
    pub space_dir: PathBuf,
    pub targets: TargetSet,
    pub trials: usize,
    pub seed: u64,
    pub n_joint: Vec<usize>,
    pub out: PathBuf,
    pub ik: IkOptions,
    pub sampler: SamplerConfig,
}

fn parent(path: &Path) -> PathBuf {
    path.parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."))
}

/// Reads a search-space file.
pub fn load_space(path: &Path) -> Result<SpaceConfig> {
    SpaceConfig::parse(&read_input(path)?).map_err(|e| CliError::input(path, e))
}

/// Reads a target-set file.
pub fn load_target_file(path: &Path) -> Result<TargetSet> {
    load_targets(&read_input(path)?).map_err(|e| CliError::input(path, e))
}

impl CampaignConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let file: CampaignFile =
            toml::from_str(&read_input(path)?).map_err(|e| CliError::input(path, e))?;
        let dir = parent(path);
        let space_path = dir.join(&file.space);
        let space = load_space(&space_path)?;
        let targets = load_target_file(&dir.join(&file.targets))?;
        let n_joint = if file.n_joint.is_empty() {
            vec![space.n_joint.unwrap_or(1)]
        } else {
            file.n_joint
        };
        let config = Self {
            space,
            space_dir: parent(&space_path),
            targets,
            trials: file.trials,
            seed: file.seed,
            n_joint,
            out: match file.out {
                Some(out) => dir.join(out),
                None => Path::new("out").join(path.file_stem().unwrap_or_default()),
            },
            ik: file.ik,
            sampler: file.sampler,
        };
        config.check().map_err(|m| CliError::input(path, m))?;
        Ok(config)
    }

    fn check(&self) -> std::result::Result<(), String> {
        if self.trials == 0 {
            return Err("field `trials`: must be at least 1".into());
        }
        if self.n_joint.contains(&0) {
            return Err("field `n_joint`: entries must be at least 1".into());
        }
        if !(self.sampler.gamma > 0.0 && self.sampler.gamma < 1.0) {
            return Err("field `sampler.gamma`: must lie in (0, 1)".into());
        }
        for n in &self.n_joint {
            self.search_space(*n)?;
        }
        Ok(())
    }

    /// The search space of the campaign with `n_joint` joints.
    pub fn search_space(&self, n_joint: usize) -> std::result::Result<SearchSpace, String> {
        let mut space = self.space.clone();
        space.n_joint = Some(n_joint);
        space
            .build(&self.space_dir, self.targets.base_range)
            .map_err(|e| e.to_string())
    }

    /// Sampler settings of the campaign, seeded from the campaign seed.
    pub fn sampler(&self) -> SamplerConfig {
        SamplerConfig {
            seed: self.seed,
            ..self.sampler.clone()
        }
    }
}

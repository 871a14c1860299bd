//! The sample, validate, decode, evaluate, tell loop of one campaign.

use morphsynth_core::design_space::{decode, validate_genotype};
use morphsynth_core::evaluation::{evaluate, penalize};
use morphsynth_core::optimizer::{DesignStudy, SamplerConfig};
use morphsynth_core::{IkOptions, SearchSpace, TargetSet};

/// Everything a finished campaign needs for its artifacts.
#[derive(Debug, Clone)]
pub struct Campaign {
    pub seed: u64,
    pub targets: TargetSet,
    pub ik: IkOptions,
    pub study: DesignStudy,
}

impl Campaign {
    pub fn space(&self) -> &SearchSpace {
        &self.study.space
    }

    /// Lowest `e_x` among feasible trials.
    pub fn best_e_x(&self) -> Option<f64> {
        self.study
            .study
            .trials()
            .iter()
            .filter(|t| t.objectives.feasible)
            .map(|t| t.objectives.e_x)
            .min_by(f64::total_cmp)
    }

    /// Final hypervolume against the campaign's own reference point.
    pub fn final_hypervolume(&self) -> f64 {
        self.study
            .study
            .reference_point()
            .and_then(|r| self.study.study.hypervolume_curve(r).last().copied())
            .unwrap_or(0.0)
    }
}

/// Runs `trials` ask/evaluate/tell rounds. Asks and tells are strictly
/// sequential; parallelism is confined to the per-target solves inside
/// [`evaluate`], so the result does not depend on the thread count.
pub fn run_campaign(
    space: SearchSpace,
    targets: &TargetSet,
    trials: usize,
    sampler: SamplerConfig,
    ik: &IkOptions,
) -> Campaign {
    let seed = sampler.seed;
    let mut study = DesignStudy::new(space, sampler);
    for _ in 0..trials {
        let genotype = study.ask();
        let report = validate_genotype(&study.space, &genotype);
        let objectives = if report.feasible() {
            let model = decode(&study.space, &genotype).expect("sampled genotypes decode");
            evaluate(&model, targets, ik)
        } else {
            penalize(targets, &report).expect("report is infeasible")
        };
        study
            .tell(&genotype, objectives)
            .expect("genotype matches the study layout");
    }
    Campaign {
        seed,
        targets: targets.clone(),
        ik: ik.clone(),
        study,
    }
}

//! Ask/tell multi-objective TPE.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::pareto::{crowding_distance, dominates, hypervolume, nondominated_sort};
use super::parzen::ProductParzen;
use super::ParamSpec;
use crate::design_space::{validate_genotype, Genotype, SearchSpace};
use crate::evaluation::ObjectiveVector;
use crate::{seed, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerConfig {
    /// Fraction of trials forming the "good" density.
    pub gamma: f64,
    /// Uniform random trials before the density model takes over.
    pub n_startup: usize,
    /// Candidates drawn from the good density per ask.
    pub n_candidates: usize,
    /// Attempts at drawing a valid design during the random phase.
    pub max_resample: usize,
    pub seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            gamma: 0.10,
            n_startup: 50,
            n_candidates: 24,
            max_resample: 100,
            seed: 0,
        }
    }
}

impl SamplerConfig {
    /// A sampler that never leaves the random phase.
    pub fn random(seed: u64) -> Self {
        Self {
            n_startup: usize::MAX,
            seed,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub id: usize,
    pub params: Vec<f64>,
    pub objectives: ObjectiveVector,
    pub rank: usize,
}

impl Trial {
    pub fn pair(&self) -> [f64; 2] {
        self.objectives.pair()
    }
}

/// Nondominated feasible trials, sorted by `e_x`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParetoArchive<'a> {
    pub members: Vec<&'a Trial>,
}

/// Sampler state of one campaign.
#[derive(Debug, Clone)]
pub struct Study {
    specs: Vec<ParamSpec>,
    config: SamplerConfig,
    trials: Vec<Trial>,
    /// Ids of the nondominated feasible trials.
    archive: Vec<usize>,
    asks: u64,
}

impl Study {
    pub fn new(specs: Vec<ParamSpec>, config: SamplerConfig) -> Self {
        Self {
            specs,
            config,
            trials: Vec::new(),
            archive: Vec::new(),
            asks: 0,
        }
    }

    pub fn config(&self) -> &SamplerConfig {
        &self.config
    }

    pub fn specs(&self) -> &[ParamSpec] {
        &self.specs
    }

    pub fn trials(&self) -> &[Trial] {
        &self.trials
    }

    fn next_rng(&mut self) -> ChaCha8Rng {
        let rng = seed::rng(seed::derive(self.config.seed, self.asks));
        self.asks += 1;
        rng
    }

    fn random_params(&self, rng: &mut impl Rng) -> Vec<f64> {
        self.specs
            .iter()
            .map(|s| match *s {
                ParamSpec::Continuous { lo, hi } => {
                    if hi > lo {
                        (lo + (hi - lo) * rng.random::<f64>()).clamp(lo, hi)
                    } else {
                        lo
                    }
                }
                ParamSpec::Categorical { n } => rng.random_range(0..n) as f64,
            })
            .collect()
    }

    /// Proposes the next parameter vector.
    ///
    /// During the random phase (and whenever the observations cannot be split
    /// into distinct good and bad sets) the vector is drawn uniformly,
    /// redrawing up to `max_resample` times until `accept` holds. Afterwards
    /// it is the candidate from the good density maximizing `l(x) / g(x)`.
    pub fn ask(&mut self, mut accept: impl FnMut(&[f64]) -> bool) -> Vec<f64> {
        let mut rng = self.next_rng();
        if self.trials.len() >= self.config.n_startup {
            if let Some((good, bad)) = self.split() {
                return self.propose(&good, &bad, &mut rng);
            }
        }
        let mut params = self.random_params(&mut rng);
        for _ in 1..self.config.max_resample.max(1) {
            if accept(&params) {
                break;
            }
            params = self.random_params(&mut rng);
        }
        params
    }

    /// Splits trial indices into the good set (the lowest nondomination ranks
    /// among feasible trials, filling `ceil(gamma * n)` with crowding-distance
    /// tie-breaks) and the bad set (everything else, including penalized trials).
    fn split(&self) -> Option<(Vec<usize>, Vec<usize>)> {
        let feasible: Vec<usize> = (0..self.trials.len())
            .filter(|&i| self.trials[i].objectives.feasible)
            .collect();
        if feasible.is_empty() {
            return None;
        }
        let first = self.trials[feasible[0]].pair();
        if self.trials.iter().all(|t| t.pair() == first) {
            return None;
        }
        let target = ((self.config.gamma * self.trials.len() as f64).ceil() as usize)
            .clamp(1, feasible.len());
        let points: Vec<[f64; 2]> = feasible.iter().map(|&i| self.trials[i].pair()).collect();
        let ranks = nondominated_sort(&points);
        let mut good = Vec::with_capacity(target);
        let mut rank = 0;
        while good.len() < target {
            let level: Vec<usize> = (0..feasible.len()).filter(|&k| ranks[k] == rank).collect();
            if good.len() + level.len() <= target {
                good.extend(level.iter().map(|&k| feasible[k]));
            } else {
                let level_points: Vec<[f64; 2]> = level.iter().map(|&k| points[k]).collect();
                let crowding = crowding_distance(&level_points);
                let mut order: Vec<usize> = (0..level.len()).collect();
                order.sort_by(|&a, &b| crowding[b].total_cmp(&crowding[a]).then(a.cmp(&b)));
                good.extend(
                    order
                        .into_iter()
                        .take(target - good.len())
                        .map(|w| feasible[level[w]]),
                );
            }
            rank += 1;
        }
        let mut is_good = vec![false; self.trials.len()];
        for &g in &good {
            is_good[g] = true;
        }
        let bad: Vec<usize> = (0..self.trials.len()).filter(|&i| !is_good[i]).collect();
        if bad.is_empty() {
            return None;
        }
        Some((good, bad))
    }

    /// Fits the good and bad densities.
    pub fn fit_densities(&self, good: &[usize], bad: &[usize]) -> (ProductParzen, ProductParzen) {
        let rows = |set: &[usize]| -> Vec<&[f64]> {
            set.iter().map(|&i| self.trials[i].params.as_slice()).collect()
        };
        (
            ProductParzen::fit(&self.specs, &rows(good)),
            ProductParzen::fit(&self.specs, &rows(bad)),
        )
    }

    fn propose(&self, good: &[usize], bad: &[usize], rng: &mut impl Rng) -> Vec<f64> {
        let (l, g) = self.fit_densities(good, bad);
        let mut best: Option<(f64, Vec<f64>)> = None;
        for _ in 0..self.config.n_candidates.max(1) {
            let candidate = l.sample(rng);
            let score = l.log_pdf(&candidate) - g.log_pdf(&candidate);
            if best.as_ref().is_none_or(|(s, _)| score > *s) {
                best = Some((score, candidate));
            }
        }
        best.expect("at least one candidate").1
    }

    /// Records an evaluated trial and returns its id.
    pub fn tell(&mut self, params: Vec<f64>, objectives: ObjectiveVector) -> Result<usize> {
        if params.len() != self.specs.len() {
            return Err(Error::Contract(format!(
                "expected {} parameters, got {}",
                self.specs.len(),
                params.len()
            )));
        }
        let id = self.trials.len();
        if self.trials.iter().any(|t| t.id == id) {
            return Err(Error::Contract(format!("duplicate trial id {id}")));
        }
        let feasible = objectives.feasible;
        let pair = objectives.pair();
        self.trials.push(Trial {
            id,
            params,
            objectives,
            rank: 0,
        });
        let points: Vec<[f64; 2]> = self.trials.iter().map(Trial::pair).collect();
        for (t, r) in self.trials.iter_mut().zip(nondominated_sort(&points)) {
            t.rank = r;
        }
        if feasible && !self.archive.iter().any(|&a| dominates(&self.trials[a].pair(), &pair)) {
            let trials = &self.trials;
            self.archive.retain(|&a| !dominates(&pair, &trials[a].pair()));
            self.archive.push(id);
        }
        Ok(id)
    }

    /// Current Pareto front of feasible trials, or `None` if no feasible trial exists.
    pub fn pareto_front(&self) -> Option<ParetoArchive<'_>> {
        if self.archive.is_empty() {
            return None;
        }
        let mut members: Vec<&Trial> = self.archive.iter().map(|&i| &self.trials[i]).collect();
        members.sort_by(|a, b| {
            a.objectives
                .e_x
                .total_cmp(&b.objectives.e_x)
                .then(a.objectives.e_tau.total_cmp(&b.objectives.e_tau))
                .then(a.id.cmp(&b.id))
        });
        Some(ParetoArchive { members })
    }

    /// Hypervolume reference: 1.1 x the componentwise maximum over the feasible
    /// trials among the first `n_startup` (or the first feasible trial if there
    /// are none), so it is frozen once the random phase ends.
    pub fn reference_point(&self) -> Option<[f64; 2]> {
        self.reference_point_within(self.config.n_startup)
    }

    /// [`Study::reference_point`] over the first `window` trials; lets a
    /// random-only study share the reference of a TPE study with the same seed.
    pub fn reference_point_within(&self, window: usize) -> Option<[f64; 2]> {
        let window = window.min(self.trials.len());
        let mut pool: Vec<[f64; 2]> = self.trials[..window]
            .iter()
            .filter(|t| t.objectives.feasible)
            .map(Trial::pair)
            .collect();
        if pool.is_empty() {
            pool.extend(
                self.trials
                    .iter()
                    .find(|t| t.objectives.feasible)
                    .map(Trial::pair),
            );
        }
        if pool.is_empty() {
            return None;
        }
        let scale = |m: f64| if m > 0.0 { 1.1 * m } else { 1.0 };
        let max = |k: usize| pool.iter().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max);
        Some([scale(max(0)), scale(max(1))])
    }

    /// Hypervolume of the feasible front after each tell, against `reference`.
    /// Points not strictly inside the reference box contribute nothing.
    pub fn hypervolume_curve(&self, reference: [f64; 2]) -> Vec<f64> {
        let mut front: Vec<[f64; 2]> = Vec::new();
        self.trials
            .iter()
            .map(|t| {
                let p = t.pair();
                if t.objectives.feasible && !front.iter().any(|f| dominates(f, &p)) {
                    front.retain(|f| !dominates(&p, f));
                    front.push(p);
                }
                let inside: Vec<[f64; 2]> = front
                    .iter()
                    .copied()
                    .filter(|q| q[0] < reference[0] && q[1] < reference[1])
                    .collect();
                hypervolume(&inside, reference).expect("points filtered to the reference box")
            })
            .collect()
    }
}

/// [`Study`] over a design search space.
#[derive(Debug, Clone)]
pub struct DesignStudy {
    pub space: SearchSpace,
    pub study: Study,
}

impl DesignStudy {
    pub fn new(space: SearchSpace, config: SamplerConfig) -> Self {
        let study = Study::new(space.param_specs(), config);
        Self { space, study }
    }

    /// Next genotype; random-phase draws are resampled until valid.
    pub fn ask(&mut self) -> Genotype {
        let space = &self.space;
        let params = self.study.ask(|p| {
            Genotype::from_params(space, p)
                .map(|g| validate_genotype(space, &g).feasible())
                .unwrap_or(false)
        });
        Genotype::from_params(&self.space, &params).expect("sampler respects the layout")
    }

    pub fn tell(&mut self, genotype: &Genotype, objectives: ObjectiveVector) -> Result<usize> {
        self.study.tell(genotype.to_params(), objectives)
    }
}

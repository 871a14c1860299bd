//! Parzen estimators for the TPE sampler.
//!
//! Every observation contributes one kernel per dimension: a normal truncated
//! to the parameter range (shared Scott bandwidth) or, for a categorical
//! dimension, a distribution putting `n / (n + k)` extra mass on the observed
//! category over a uniform floor of `1 / (n + k)`. Averaging a dimension's
//! kernels gives its marginal density; [`ProductParzen`] multiplies the kernels
//! of one observation across dimensions before averaging, so candidates keep
//! the joint structure of the designs they were drawn around.

use rand::Rng;
use rand_distr::StandardNormal;

use super::ParamSpec;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

fn log_sum_exp(values: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.collect();
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + v.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Mixture of equally weighted normals truncated to `[lo, hi]`, one per observation.
#[derive(Debug, Clone)]
pub struct TruncatedParzen {
    lo: f64,
    hi: f64,
    mus: Vec<f64>,
    sigma: f64,
    /// `ln(sigma * Z_i)` with `Z_i` the truncated mass of component `i`.
    log_norms: Vec<f64>,
}

impl TruncatedParzen {
    /// Fits with Scott's bandwidth `std * n^(-1/5)`, floored at 1% of the range.
    pub fn fit(lo: f64, hi: f64, observations: &[f64]) -> Self {
        let n = observations.len();
        let floor = 0.01 * (hi - lo);
        let sigma = if n < 2 {
            (hi - lo).max(floor)
        } else {
            let mean = observations.iter().sum::<f64>() / n as f64;
            let var = observations.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var.sqrt() * (n as f64).powf(-0.2)).max(floor)
        };
        let log_norms = observations
            .iter()
            .map(|mu| {
                let mass = normal_cdf((hi - mu) / sigma) - normal_cdf((lo - mu) / sigma);
                sigma.ln() + mass.max(1e-300).ln()
            })
            .collect();
        Self {
            lo,
            hi,
            mus: observations.to_vec(),
            sigma,
            log_norms,
        }
    }

    pub fn bandwidth(&self) -> f64 {
        self.sigma
    }

    pub fn log_pdf(&self, x: f64) -> f64 {
        if !(self.lo..=self.hi).contains(&x) {
            return f64::NEG_INFINITY;
        }
        if self.mus.is_empty() {
            return -(self.hi - self.lo).ln();
        }
        log_sum_exp((0..self.mus.len()).map(|i| self.component_log_pdf(i, x)))
            - (self.mus.len() as f64).ln()
    }

    pub fn len(&self) -> usize {
        self.mus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mus.is_empty()
    }

    /// Log density of kernel `i` alone.
    pub fn component_log_pdf(&self, i: usize, x: f64) -> f64 {
        if !(self.lo..=self.hi).contains(&x) {
            return f64::NEG_INFINITY;
        }
        let z = (x - self.mus[i]) / self.sigma;
        -0.5 * z * z - LN_SQRT_2PI - self.log_norms[i]
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.mus.is_empty() {
            return self.lo + (self.hi - self.lo) * rng.random::<f64>();
        }
        self.sample_component(rng.random_range(0..self.mus.len()), rng)
    }

    /// Draws from kernel `i`.
    pub fn sample_component<R: Rng + ?Sized>(&self, i: usize, rng: &mut R) -> f64 {
        let mu = self.mus[i];
        for _ in 0..100 {
            let z: f64 = rng.sample(StandardNormal);
            let x = mu + self.sigma * z;
            if (self.lo..=self.hi).contains(&x) {
                return x;
            }
        }
        mu.clamp(self.lo, self.hi)
    }
}

/// Category frequencies with a Laplace (add-one) prior.
#[derive(Debug, Clone)]
pub struct CategoricalParzen {
    observations: Vec<usize>,
    mass: Vec<f64>,
    /// Log kernel mass on the observed category and on any other one.
    log_own: f64,
    log_other: f64,
}

impl CategoricalParzen {
    pub fn fit(n: usize, observations: &[f64]) -> Self {
        let observations: Vec<usize> = observations.iter().map(|&o| o as usize).collect();
        let mut counts = vec![1.0; n];
        for &o in &observations {
            counts[o] += 1.0;
        }
        let total: f64 = counts.iter().sum();
        let m = observations.len() as f64;
        Self {
            mass: counts.into_iter().map(|c| c / total).collect(),
            log_own: ((m + 1.0) / total).ln(),
            log_other: (1.0 / total).ln(),
            observations,
        }
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn log_pdf(&self, x: f64) -> f64 {
        self.mass
            .get(x as usize)
            .map_or(f64::NEG_INFINITY, |m| m.ln())
    }

    pub fn component_log_pdf(&self, i: usize, x: f64) -> f64 {
        let c = x as usize;
        if c >= self.mass.len() {
            f64::NEG_INFINITY
        } else if c == self.observations[i] {
            self.log_own
        } else {
            self.log_other
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (k, m) in self.mass.iter().enumerate() {
            acc += m;
            if u < acc {
                return k as f64;
            }
        }
        (self.mass.len() - 1) as f64
    }

    pub fn sample_component<R: Rng + ?Sized>(&self, i: usize, rng: &mut R) -> f64 {
        let k = self.mass.len();
        let keep = 1.0 - k as f64 * self.log_other.exp();
        if rng.random::<f64>() < keep {
            self.observations[i] as f64
        } else {
            rng.random_range(0..k) as f64
        }
    }
}

#[derive(Debug, Clone)]
pub enum Estimator {
    Continuous(TruncatedParzen),
    Categorical(CategoricalParzen),
    /// Zero-width continuous dimension.
    Constant(f64),
}

impl Estimator {
    pub fn fit(spec: &ParamSpec, observations: &[f64]) -> Self {
        match *spec {
            ParamSpec::Continuous { lo, hi } if hi > lo => {
                Estimator::Continuous(TruncatedParzen::fit(lo, hi, observations))
            }
            ParamSpec::Continuous { lo, .. } => Estimator::Constant(lo),
            ParamSpec::Categorical { n } => {
                Estimator::Categorical(CategoricalParzen::fit(n, observations))
            }
        }
    }

    pub fn log_pdf(&self, x: f64) -> f64 {
        match self {
            Estimator::Continuous(e) => e.log_pdf(x),
            Estimator::Categorical(e) => e.log_pdf(x),
            Estimator::Constant(_) => 0.0,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Estimator::Continuous(e) => e.sample(rng),
            Estimator::Categorical(e) => e.sample(rng),
            Estimator::Constant(c) => *c,
        }
    }

    pub fn component_log_pdf(&self, i: usize, x: f64) -> f64 {
        match self {
            Estimator::Continuous(e) => e.component_log_pdf(i, x),
            Estimator::Categorical(e) => e.component_log_pdf(i, x),
            Estimator::Constant(_) => 0.0,
        }
    }

    pub fn sample_component<R: Rng + ?Sized>(&self, i: usize, rng: &mut R) -> f64 {
        match self {
            Estimator::Continuous(e) => e.sample_component(i, rng),
            Estimator::Categorical(e) => e.sample_component(i, rng),
            Estimator::Constant(c) => *c,
        }
    }
}

/// Mixture over observations of per-dimension kernel products.
#[derive(Debug, Clone)]
pub struct ProductParzen {
    /// Marginal estimators, one per dimension.
    pub dims: Vec<Estimator>,
    n: usize,
}

impl ProductParzen {
    /// `rows` are observations, each with one value per entry of `specs`.
    pub fn fit(specs: &[ParamSpec], rows: &[&[f64]]) -> Self {
        assert!(!rows.is_empty(), "at least one observation");
        let dims = specs
            .iter()
            .enumerate()
            .map(|(d, spec)| {
                let column: Vec<f64> = rows.iter().map(|r| r[d]).collect();
                Estimator::fit(spec, &column)
            })
            .collect();
        Self {
            dims,
            n: rows.len(),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn log_pdf(&self, x: &[f64]) -> f64 {
        let mut terms = vec![0.0; self.n];
        for (e, &v) in self.dims.iter().zip(x) {
            for (i, t) in terms.iter_mut().enumerate() {
                *t += e.component_log_pdf(i, v);
            }
        }
        log_sum_exp(terms.into_iter()) - (self.n as f64).ln()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let i = rng.random_range(0..self.n);
        self.dims.iter().map(|e| e.sample_component(i, rng)).collect()
    }
}

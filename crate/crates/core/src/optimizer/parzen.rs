//! One-dimensional density estimators used by the TPE sampler.

use rand::Rng;
use rand_distr::StandardNormal;

const MIN_BANDWIDTH_FRACTION: f64 = 0.01;
const MAX_REJECTIONS: usize = 64;

fn std_normal_cdf(z: f64) -> f64 {
    0.5 * (1.0 + libm::erf(z / std::f64::consts::SQRT_2))
}

/// Gaussian kernel truncated to `[low, high]` and renormalized.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Kernel {
    mu: f64,
    sigma: f64,
    /// Probability mass of the untruncated kernel inside the bounds.
    mass: f64,
}

impl Kernel {
    fn new(mu: f64, sigma: f64, low: f64, high: f64) -> Self {
        let mass = std_normal_cdf((high - mu) / sigma) - std_normal_cdf((low - mu) / sigma);
        Kernel {
            mu,
            sigma,
            mass: mass.max(f64::MIN_POSITIVE),
        }
    }

    fn pdf(&self, x: f64) -> f64 {
        let z = (x - self.mu) / self.sigma;
        (-0.5 * z * z).exp() / (self.sigma * (2.0 * std::f64::consts::PI).sqrt() * self.mass)
    }
}

/// Parzen mixture over a bounded real interval: one truncated Gaussian per
/// observation plus a uniform prior component.
#[derive(Debug, Clone, PartialEq)]
pub struct ParzenEstimator {
    low: f64,
    high: f64,
    prior_weight: f64,
    kernels: Vec<Kernel>,
}

impl ParzenEstimator {
    /// Bandwidth of each observation is the larger of the gaps to its sorted
    /// neighbours, floored at 1% of the interval width. A lone observation
    /// gets the full width.
    pub fn fit(observations: &[f64], low: f64, high: f64, prior_weight: f64) -> Self {
        let width = high - low;
        let mut sorted = observations.to_vec();
        sorted.sort_by(f64::total_cmp);
        let floor = width * MIN_BANDWIDTH_FRACTION;
        let kernels = sorted
            .iter()
            .enumerate()
            .map(|(i, &mu)| {
                let left = (i > 0).then(|| mu - sorted[i - 1]);
                let right = sorted.get(i + 1).map(|next| next - mu);
                let gap = match (left, right) {
                    (Some(l), Some(r)) => l.max(r),
                    (Some(g), None) | (None, Some(g)) => g,
                    (None, None) => width,
                };
                Kernel::new(mu, gap.clamp(floor, width), low, high)
            })
            .collect();
        ParzenEstimator {
            low,
            high,
            prior_weight,
            kernels,
        }
    }

    fn total_weight(&self) -> f64 {
        self.kernels.len() as f64 + self.prior_weight
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if !(self.low..=self.high).contains(&x) {
            return 0.0;
        }
        let kernels: f64 = self.kernels.iter().map(|k| k.pdf(x)).sum();
        (kernels + self.prior_weight / (self.high - self.low)) / self.total_weight()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let pick = rng.gen::<f64>() * self.total_weight();
        if pick < self.prior_weight || self.kernels.is_empty() {
            return rng.gen_range(self.low..self.high);
        }
        let idx = ((pick - self.prior_weight) as usize).min(self.kernels.len() - 1);
        let k = self.kernels[idx];
        for _ in 0..MAX_REJECTIONS {
            let z: f64 = rng.sample(StandardNormal);
            let x = k.mu + k.sigma * z;
            if x >= self.low && x < self.high {
                return x;
            }
        }
        k.mu.clamp(self.low, self.high)
    }
}

/// Smoothed categorical distribution over `0..categories`.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoricalEstimator {
    probs: Vec<f64>,
}

impl CategoricalEstimator {
    /// Each category receives `prior_weight / categories` pseudo-counts.
    pub fn fit(observations: &[usize], categories: usize, prior_weight: f64) -> Self {
        let mut counts = vec![prior_weight / categories as f64; categories];
        for &o in observations {
            counts[o] += 1.0;
        }
        let total = observations.len() as f64 + prior_weight;
        CategoricalEstimator {
            probs: counts.into_iter().map(|c| c / total).collect(),
        }
    }

    pub fn pmf(&self, category: usize) -> f64 {
        self.probs.get(category).copied().unwrap_or(0.0)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let mut u = rng.gen::<f64>();
        for (i, p) in self.probs.iter().enumerate() {
            if u < *p {
                return i;
            }
            u -= p;
        }
        self.probs.len() - 1
    }
}

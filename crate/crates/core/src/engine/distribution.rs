use rand::Rng;

/// Probability of each register-1 outcome `y` in `S_Q = {0, ..., Q-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    probs: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn from_probs(probs: Vec<f64>) -> Self {
        OutcomeDistribution { probs }
    }

    pub fn register_size(&self) -> u64 {
        self.probs.len() as u64
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, y: u64) -> f64 {
        self.probs.get(y as usize).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Largest entrywise absolute difference; `None` on a size mismatch.
    pub fn max_abs_diff(&self, other: &OutcomeDistribution) -> Option<f64> {
        (self.probs.len() == other.probs.len()).then(|| {
            self.probs
                .iter()
                .zip(&other.probs)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        })
    }

    pub fn sampler(&self) -> InverseCdf {
        InverseCdf::new(&self.probs)
    }
}

/// Inverse-CDF sampler. Outcomes with zero probability are never returned.
#[derive(Debug, Clone)]
pub struct InverseCdf {
    cumulative: Vec<f64>,
    last_supported: usize,
}

impl InverseCdf {
    /// Panics if every weight is zero.
    pub fn new(weights: &[f64]) -> Self {
        let mut acc = 0.0;
        let cumulative: Vec<f64> = weights
            .iter()
            .map(|&w| {
                acc += w;
                acc
            })
            .collect();
        let last_supported = weights
            .iter()
            .rposition(|&w| w > 0.0)
            .expect("distribution has no support");
        InverseCdf {
            cumulative,
            last_supported,
        }
    }

    /// Maps `u` in `[0, 1)` to the first outcome whose cumulative mass
    /// exceeds `u * total`.
    pub fn sample_at(&self, u: f64) -> u64 {
        let total = self.cumulative[self.cumulative.len() - 1];
        let target = u * total;
        let idx = self.cumulative.partition_point(|&c| c <= target);
        idx.min(self.last_supported) as u64
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        self.sample_at(rng.gen::<f64>())
    }
}

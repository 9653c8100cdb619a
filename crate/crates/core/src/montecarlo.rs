//! Repeated runs of the quantum step for a fixed `(N, m)`, measuring how often
//! the period is recovered.
//!
//! Everything before the measurement is deterministic, so the pre-measurement
//! state is prepared once; each trial then measures it with its own RNG
//! stream and runs the convergent scan on the outcome.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::{asymptotic_success_bound, success_lower_bound, AsymptoticBound};
use crate::engine::{
    choose_geometry, prepare_pre_measurement_state, reg1_distribution, ModExpFunction,
    OutcomeDistribution, DEFAULT_MAX_AMPLITUDES,
};
use crate::error::{Error, Result};
use crate::number_theory::multiplicative_order;
use crate::pipeline::step25_recover_period;
use crate::serialize::{prob17, prob17_opt};

/// Two-sided 95% standard normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// Seed for trial `index` under `master`. Each trial can be replayed alone.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    // splitmix64 finalizer over a golden-ratio stride
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialResult {
    /// The scan returned the true period.
    Recovered,
    /// The scan returned a proper multiple of the period.
    Multiple,
    NotFound,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct OutcomeCounts {
    pub recovered: u64,
    pub multiple: u64,
    pub not_found: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloReport {
    pub n: u64,
    pub m: u64,
    pub register_size: u64,
    pub period: u64,
    pub trials: u64,
    pub seed: u64,
    pub forced_y: Option<u64>,
    pub successes: u64,
    #[serde(serialize_with = "prob17")]
    pub fraction: f64,
    #[serde(serialize_with = "prob17")]
    pub wilson_low: f64,
    #[serde(serialize_with = "prob17")]
    pub wilson_high: f64,
    /// Total probability of the outcomes whose scan recovers the period.
    #[serde(serialize_with = "prob17")]
    pub exact_success_probability: f64,
    #[serde(serialize_with = "prob17")]
    pub success_lower_bound: f64,
    #[serde(serialize_with = "prob17_opt")]
    pub asymptotic_bound: Option<f64>,
    pub asymptotic_bound_source: AsymptoticBound,
    pub outcomes: OutcomeCounts,
    /// Count of each measured `y`.
    #[serde(skip)]
    pub histogram: BTreeMap<u64, u64>,
}

fn classify(y: u64, q: u64, m: u64, n: u64, period: u64) -> Result<TrialResult> {
    Ok(match step25_recover_period(y, q, m, n)?.period {
        Some(p) if p == period => TrialResult::Recovered,
        Some(_) => TrialResult::Multiple,
        None => TrialResult::NotFound,
    })
}

/// Sum of `Prob(y)` over every `y` whose convergent scan yields the period.
pub fn exact_success_probability(
    dist: &OutcomeDistribution,
    m: u64,
    n: u64,
    period: u64,
) -> Result<f64> {
    let q = dist.register_size();
    let mut total = 0.0;
    for (y, &p) in dist.probs().iter().enumerate() {
        if p > 0.0 && classify(y as u64, q, m, n, period)? == TrialResult::Recovered {
            total += p;
        }
    }
    Ok(total)
}

pub fn monte_carlo_step2(
    n: u64,
    m: u64,
    trials: u64,
    seed: u64,
    forced_y: Option<u64>,
) -> Result<MonteCarloReport> {
    if trials == 0 {
        return Err(Error::NoTrials);
    }
    let f = ModExpFunction::new(m, n)?;
    let geometry = choose_geometry(n)?;
    let q = geometry.register_size();
    let period = multiplicative_order(m, n)?;
    let state = prepare_pre_measurement_state(geometry, &f, DEFAULT_MAX_AMPLITUDES)?;
    let dist = reg1_distribution(&state);
    if let Some(y) = forced_y {
        if y >= q {
            return Err(Error::OutcomeOutOfRange { y, q });
        }
        if dist.prob(y) == 0.0 {
            return Err(Error::ZeroProbabilityOutcome(y));
        }
    }

    let sampler = dist.sampler();
    let mut outcomes = OutcomeCounts::default();
    let mut histogram = BTreeMap::new();
    for i in 0..trials {
        let y = match forced_y {
            Some(y) => y,
            None => sampler.sample(&mut ChaCha8Rng::seed_from_u64(trial_seed(seed, i))),
        };
        *histogram.entry(y).or_insert(0) += 1;
        match classify(y, q, m, n, period)? {
            TrialResult::Recovered => outcomes.recovered += 1,
            TrialResult::Multiple => outcomes.multiple += 1,
            TrialResult::NotFound => outcomes.not_found += 1,
        }
    }

    let successes = outcomes.recovered;
    let (wilson_low, wilson_high) = wilson_interval(successes, trials, Z_95);
    let asymptotic = asymptotic_success_bound(period, n);
    Ok(MonteCarloReport {
        n,
        m,
        register_size: q,
        period,
        trials,
        seed,
        forced_y,
        successes,
        fraction: successes as f64 / trials as f64,
        wilson_low,
        wilson_high,
        exact_success_probability: exact_success_probability(&dist, m, n, period)?,
        success_lower_bound: success_lower_bound(period, n)?,
        asymptotic_bound: asymptotic.value(),
        asymptotic_bound_source: asymptotic,
        outcomes,
        histogram,
    })
}

//! The five-step factoring loop around the simulated period finder.
//!
//! Steps 1, 3, 4 and 5 are classical. Step 2 prepares the two-register state,
//! measures register 1 and recovers the period from the continued-fraction
//! convergents of `y / Q`. Every attempt is recorded in a
//! [`FactorizationTrace`].

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::{centered_residue, in_lemma_set, nearest_numerator};
use crate::continued_fraction::cf_expand;
use crate::engine::{
    choose_geometry_with_limit, measure_reg1, measure_reg1_forced, prepare_pre_measurement_state,
    reg1_distribution, ModExpFunction, RegisterGeometry, DEFAULT_MAX_AMPLITUDES,
    DEFAULT_MAX_MODULUS,
};
use crate::error::{Error, Result};
use crate::number_theory::{gcd_euclid, miller_rabin, mod_pow, perfect_power, PrimalityVerdict};
use crate::serialize::prob17;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShorConfig {
    pub rng_seed: u64,
    pub max_outer_retries: u32,
    pub miller_rabin_rounds: u32,
    /// Base used by the first attempt instead of a random draw.
    pub forced_m: Option<u64>,
    /// Outcome used by the first measurement instead of sampling.
    pub forced_y: Option<u64>,
    /// Register size `Q`; must still satisfy `N^2 <= Q < 2 N^2`.
    pub q_override: Option<u64>,
    pub max_modulus: u64,
    pub max_amplitudes: u64,
}

impl Default for ShorConfig {
    fn default() -> Self {
        ShorConfig {
            rng_seed: 0,
            max_outer_retries: 100,
            miller_rabin_rounds: 20,
            forced_m: None,
            forced_y: None,
            q_override: None,
            max_modulus: DEFAULT_MAX_MODULUS,
            max_amplitudes: DEFAULT_MAX_AMPLITUDES,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "factor", rename_all = "snake_case")]
pub enum StepOutcome {
    FactorFound(u64),
    LuckyGcd(u64),
    OddPeriod,
    TrivialRoot,
    PeriodRecoveryFailed,
}

impl StepOutcome {
    pub fn factor(&self) -> Option<u64> {
        match *self {
            StepOutcome::FactorFound(d) | StepOutcome::LuckyGcd(d) => Some(d),
            _ => None,
        }
    }
}

/// One `m^{q_n} mod N` check made while scanning convergents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConvergentTest {
    pub n: usize,
    pub q_n: u64,
    pub residue: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PeriodRecovery {
    pub period: Option<u64>,
    pub tests: Vec<ConvergentTest>,
}

/// Where a recovered period places the measured outcome relative to the
/// set `|{P y}_Q| <= P/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LemmaPlacement {
    pub numerator: u64,
    pub residue: i128,
    pub in_lemma_set: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasurementRecord {
    pub y: u64,
    pub forced: bool,
    #[serde(serialize_with = "prob17")]
    pub probability: f64,
    pub convergent_tests: Vec<ConvergentTest>,
    pub lemma: Option<LemmaPlacement>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttemptRecord {
    pub attempt: u32,
    pub m: u64,
    pub m_forced: bool,
    pub gcd: u64,
    pub measurement: Option<MeasurementRecord>,
    pub period: Option<u64>,
    /// `m^{P/2} mod N` for even periods.
    pub half_power: Option<u64>,
    pub outcome: StepOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorizationTrace {
    pub n: u64,
    pub m: u64,
    pub register_size: u64,
    pub qubits: u32,
    pub primality: PrimalityVerdict,
    pub retries: u32,
    /// Every failed attempt re-enters at Step 1 with a fresh base.
    pub retry_policy: &'static str,
    pub attempts: Vec<AttemptRecord>,
    pub outcome: StepOutcome,
    #[serde(skip)]
    pub elapsed: Duration,
}

/// Draws `m` uniformly from `[2, N-1]` and returns it with `gcd(m, N)`.
pub fn step1_choose_m<R: Rng + ?Sized>(n: u64, rng: &mut R) -> Result<(u64, u64)> {
    if n < 3 {
        return Err(Error::ModulusTooSmallToFactor(n));
    }
    let m = rng.gen_range(2..n);
    Ok((m, gcd_euclid(m, n)?))
}

/// Scans the convergents `p_n / q_n` of `y / Q` in order and returns the
/// first `q_n` with `m^{q_n} = 1 mod N`. The scan stops once `q_n > N`.
pub fn step25_recover_period(y: u64, register_size: u64, m: u64, n: u64) -> Result<PeriodRecovery> {
    if n < 2 {
        return Err(Error::ModulusTooSmall(n));
    }
    let expansion = cf_expand(y, register_size)?;
    let mut tests = Vec::new();
    for (idx, &(_, q_n)) in expansion.convergents().iter().enumerate() {
        if q_n > n {
            break;
        }
        let residue = mod_pow(m, q_n, n)?;
        tests.push(ConvergentTest {
            n: idx,
            q_n,
            residue,
        });
        if residue == 1 {
            return Ok(PeriodRecovery {
                period: Some(q_n),
                tests,
            });
        }
    }
    Ok(PeriodRecovery {
        period: None,
        tests,
    })
}

/// Steps 3 to 5 for a period `P` of `m`.
///
/// A half power of `+1` (possible only when `P` is a multiple of the true
/// order) yields no factor either and is reported as [`StepOutcome::TrivialRoot`].
pub fn step345_classical(m: u64, period: u64, n: u64) -> Result<StepOutcome> {
    if period == 0 || mod_pow(m, period, n)? != 1 {
        return Err(Error::NotAPeriod {
            base: m,
            period,
            modulus: n,
        });
    }
    if period % 2 == 1 {
        return Ok(StepOutcome::OddPeriod);
    }
    let half = mod_pow(m, period / 2, n)?;
    if half == n - 1 || half == 1 {
        return Ok(StepOutcome::TrivialRoot);
    }
    Ok(StepOutcome::FactorFound(gcd_euclid(half - 1, n)?))
}

/// Rejects inputs the pipeline cannot factor, returning the primality verdict
/// for composite ones.
pub fn check_preconditions<R: Rng + ?Sized>(
    n: u64,
    config: &ShorConfig,
    rng: &mut R,
) -> Result<PrimalityVerdict> {
    if n < 3 {
        return Err(Error::ModulusTooSmallToFactor(n));
    }
    if n.is_multiple_of(2) {
        return Err(Error::EvenModulus(n));
    }
    if n > config.max_modulus {
        return Err(Error::Capacity {
            n,
            limit: config.max_modulus,
        });
    }
    let verdict = miller_rabin(n, config.miller_rabin_rounds, rng)?;
    if verdict.is_probable_prime() {
        return Err(Error::ProbablyPrime(n));
    }
    if let Some((base, exponent)) = perfect_power(n) {
        return Err(Error::PerfectPower { n, base, exponent });
    }
    Ok(verdict)
}

pub fn shor_factor(n: u64, config: &ShorConfig) -> Result<(StepOutcome, FactorizationTrace)> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let primality = check_preconditions(n, config, &mut rng)?;
    let geometry = match config.q_override {
        Some(q) => RegisterGeometry::with_register_size(n, q)?,
        None => choose_geometry_with_limit(n, config.max_modulus)?,
    };
    if let Some(m) = config.forced_m {
        if !(2..n).contains(&m) {
            return Err(Error::InvalidForcedBase { m, n });
        }
    }
    if let Some(y) = config.forced_y {
        let q = geometry.register_size();
        if y >= q {
            return Err(Error::OutcomeOutOfRange { y, q });
        }
    }

    let mut attempts = Vec::new();
    let mut outcome = StepOutcome::PeriodRecoveryFailed;
    for attempt in 0..config.max_outer_retries {
        let forced_m = config.forced_m.filter(|_| attempt == 0);
        let forced_y = config.forced_y.filter(|_| attempt == 0);
        let record = run_attempt(attempt, geometry, forced_m, forced_y, config, &mut rng)?;
        let result = record.outcome;
        attempts.push(record);
        if result.factor().is_some() {
            outcome = result;
            break;
        }
    }

    let failed = attempts
        .iter()
        .filter(|a| a.outcome.factor().is_none())
        .count() as u32;
    let trace = FactorizationTrace {
        n,
        m: attempts.last().map_or(0, |a| a.m),
        register_size: geometry.register_size(),
        qubits: geometry.qubits(),
        primality,
        retries: failed,
        retry_policy: "redraw_m",
        attempts,
        outcome,
        elapsed: start.elapsed(),
    };
    Ok((outcome, trace))
}

fn run_attempt<R: Rng + ?Sized>(
    attempt: u32,
    geometry: RegisterGeometry,
    forced_m: Option<u64>,
    forced_y: Option<u64>,
    config: &ShorConfig,
    rng: &mut R,
) -> Result<AttemptRecord> {
    let n = geometry.modulus();
    let (m, g) = match forced_m {
        Some(m) => (m, gcd_euclid(m, n)?),
        None => step1_choose_m(n, rng)?,
    };
    let mut record = AttemptRecord {
        attempt,
        m,
        m_forced: forced_m.is_some(),
        gcd: g,
        measurement: None,
        period: None,
        half_power: None,
        outcome: StepOutcome::LuckyGcd(g),
    };
    if g != 1 {
        return Ok(record);
    }

    let f = ModExpFunction::new(m, n)?;
    let state = prepare_pre_measurement_state(geometry, &f, config.max_amplitudes)?;
    let probs = reg1_distribution(&state);
    let y = match forced_y {
        Some(y) => measure_reg1_forced(state, y)?.0,
        None => measure_reg1(state, rng).0,
    };
    let q = geometry.register_size();
    let recovery = step25_recover_period(y, q, m, n)?;
    record.period = recovery.period;
    record.measurement = Some(MeasurementRecord {
        y,
        forced: forced_y.is_some(),
        probability: probs.prob(y),
        convergent_tests: recovery.tests,
        lemma: recovery.period.map(|p| LemmaPlacement {
            numerator: nearest_numerator(p, q, y),
            residue: centered_residue(p, q, y),
            in_lemma_set: in_lemma_set(p, q, y),
        }),
    });

    record.outcome = match recovery.period {
        None => StepOutcome::PeriodRecoveryFailed,
        Some(p) => {
            if p % 2 == 0 {
                record.half_power = Some(mod_pow(m, p / 2, n)?);
            }
            step345_classical(m, p, n)?
        }
    };
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::continued_fraction::convergents_of;

    #[test]
    fn step1_examples() {
        assert_eq!(gcd_euclid(3, 91), Ok(1));
        assert_eq!(gcd_euclid(7, 91), Ok(7));
        assert_eq!(gcd_euclid(13, 91), Ok(13));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let (m, g) = step1_choose_m(91, &mut rng).unwrap();
            assert!((2..91).contains(&m));
            assert_eq!(g, gcd_euclid(m, 91).unwrap());
        }
    }

    #[test]
    fn step25_worked_example() {
        let r = step25_recover_period(13453, 16384, 3, 91).unwrap();
        assert_eq!(r.period, Some(6));
        let last_two: Vec<_> = r.tests.iter().rev().take(2).rev().copied().collect();
        assert_eq!(
            last_two,
            [
                ConvergentTest {
                    n: 2,
                    q_n: 5,
                    residue: 61
                },
                ConvergentTest {
                    n: 3,
                    q_n: 6,
                    residue: 1
                },
            ]
        );
    }

    #[test]
    fn step25_zero_outcome_fails() {
        let r = step25_recover_period(0, 16384, 3, 91).unwrap();
        assert_eq!(r.period, None);
        assert_eq!(
            r.tests,
            [ConvergentTest {
                n: 0,
                q_n: 1,
                residue: 3
            }]
        );
    }

    #[test]
    fn step25_finds_one_sixth() {
        // brute force: 1/6 must be among the convergents of 2731/16384
        let cf = cf_expand(2731, 16384).unwrap();
        assert!(convergents_of(&cf).contains(&(1, 6)));
        assert_eq!(
            step25_recover_period(2731, 16384, 3, 91).unwrap().period,
            Some(6)
        );
    }

    #[test]
    fn step345_examples() {
        assert_eq!(
            step345_classical(3, 6, 91),
            Ok(StepOutcome::FactorFound(13))
        );
        assert_eq!(step345_classical(9, 3, 91), Ok(StepOutcome::OddPeriod));
        assert_eq!(step345_classical(14, 2, 15), Ok(StepOutcome::TrivialRoot));
        assert_eq!(step345_classical(3, 12, 91), Ok(StepOutcome::TrivialRoot));
        assert_eq!(
            step345_classical(3, 5, 91),
            Err(Error::NotAPeriod {
                base: 3,
                period: 5,
                modulus: 91
            })
        );
    }

    #[test]
    fn worked_example_pipeline() {
        let config = ShorConfig {
            forced_m: Some(3),
            forced_y: Some(13453),
            ..ShorConfig::default()
        };
        let (outcome, trace) = shor_factor(91, &config).unwrap();
        assert_eq!(outcome, StepOutcome::FactorFound(13));
        assert_eq!(trace.attempts.len(), 1);
        assert_eq!(trace.retries, 0);
        assert_eq!((trace.register_size, trace.qubits), (16384, 14));
        let a = &trace.attempts[0];
        assert_eq!((a.period, a.half_power), (Some(6), Some(27)));
        let meas = a.measurement.as_ref().unwrap();
        assert_eq!(meas.y, 13453);
        assert!(!meas.lemma.unwrap().in_lemma_set);
        assert_eq!(meas.lemma.unwrap().numerator, 5);
    }

    #[test]
    fn lucky_gcd_short_circuits() {
        let config = ShorConfig {
            forced_m: Some(7),
            ..ShorConfig::default()
        };
        let (outcome, trace) = shor_factor(91, &config).unwrap();
        assert_eq!(outcome, StepOutcome::LuckyGcd(7));
        assert!(trace.attempts[0].measurement.is_none());
    }

    #[test]
    fn small_semiprimes_factor() {
        for (n, seeds) in [(15u64, 0..20u64), (21, 0..20), (35, 0..10), (33, 0..10)] {
            for seed in seeds {
                let config = ShorConfig {
                    rng_seed: seed,
                    ..ShorConfig::default()
                };
                let (outcome, _) = shor_factor(n, &config).unwrap();
                let d = outcome.factor().expect("factor found");
                assert!(1 < d && d < n && n % d == 0, "N={n} seed={seed} d={d}");
            }
        }
    }

    #[test]
    fn precondition_errors() {
        let c = ShorConfig::default();
        assert_eq!(shor_factor(12, &c).unwrap_err(), Error::EvenModulus(12));
        assert_eq!(shor_factor(97, &c).unwrap_err(), Error::ProbablyPrime(97));
        assert_eq!(
            shor_factor(243, &c).unwrap_err(),
            Error::PerfectPower {
                n: 243,
                base: 3,
                exponent: 5
            }
        );
        assert_eq!(
            shor_factor(1, &c).unwrap_err(),
            Error::ModulusTooSmallToFactor(1)
        );
        let bad_q = ShorConfig {
            q_override: Some(8192),
            ..ShorConfig::default()
        };
        assert!(matches!(
            shor_factor(91, &bad_q),
            Err(Error::InvalidRegisterSize { .. })
        ));
        let bad_m = ShorConfig {
            forced_m: Some(91),
            ..ShorConfig::default()
        };
        assert_eq!(
            shor_factor(91, &bad_m).unwrap_err(),
            Error::InvalidForcedBase { m: 91, n: 91 }
        );
    }

    #[test]
    fn exhausted_retries_report_failure() {
        // y = 0 never reveals a period, and a single attempt is allowed
        let config = ShorConfig {
            forced_m: Some(3),
            forced_y: Some(0),
            max_outer_retries: 1,
            ..ShorConfig::default()
        };
        let (outcome, trace) = shor_factor(91, &config).unwrap();
        assert_eq!(outcome, StepOutcome::PeriodRecoveryFailed);
        assert_eq!(trace.retries, 1);
    }

    #[test]
    fn runs_are_reproducible() {
        let config = ShorConfig {
            rng_seed: 42,
            ..ShorConfig::default()
        };
        let a = shor_factor(91, &config).unwrap().1;
        let b = shor_factor(91, &config).unwrap().1;
        assert_eq!(a.attempts, b.attempts);
    }
}

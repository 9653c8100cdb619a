//! Analytic outcome distribution for a function of known period `P`.
//!
//! With `Q = P q + r` (`0 <= r < P`) and `Q_0 = P q`:
//!
//! ```text
//! Prob(y) = [r sin^2(t (q + 1)) + (P - r) sin^2(t q)] / [Q^2 sin^2(t)]   if P y != 0 mod Q
//!         = [r (q + 1)^2 + (P - r) q^2] / Q^2                            otherwise
//! ```
//!
//! where `t = pi P y / Q`. Every angle is formed from the centered residue
//! `{P y}_Q` instead of `P y`; `sin^2` has period `pi` so the value is
//! unchanged, but the argument stays below `pi / 2`.

use std::f64::consts::PI;

use serde::Serialize;

use super::distribution::OutcomeDistribution;
use crate::error::{Error, Result};
use crate::number_theory::smallest_magnitude_residue;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ClosedFormParams {
    period: u64,
    register_size: u64,
    quotient: u64,
    remainder: u64,
    truncated: u64,
}

impl ClosedFormParams {
    /// `P`.
    pub fn period(&self) -> u64 {
        self.period
    }

    /// `Q`.
    pub fn register_size(&self) -> u64 {
        self.register_size
    }

    /// `q` in `Q = P q + r`.
    pub fn quotient(&self) -> u64 {
        self.quotient
    }

    /// `r` in `Q = P q + r`.
    pub fn remainder(&self) -> u64 {
        self.remainder
    }

    /// `Q_0 = P q`.
    pub fn truncated(&self) -> u64 {
        self.truncated
    }
}

pub fn closed_form_params(period: u64, register_size: u64) -> Result<ClosedFormParams> {
    if period == 0 {
        return Err(Error::ZeroPeriod);
    }
    if register_size == 0 {
        return Err(Error::ZeroDenominator);
    }
    let quotient = register_size / period;
    Ok(ClosedFormParams {
        period,
        register_size,
        quotient,
        remainder: register_size % period,
        truncated: period * quotient,
    })
}

/// `Prob(y)` for `y` in `S_Q`. Larger `y` are taken modulo `Q`.
pub fn closed_form_prob(y: u64, params: &ClosedFormParams) -> f64 {
    let ClosedFormParams {
        period: p,
        register_size: q_size,
        quotient: q,
        remainder: r,
        ..
    } = *params;
    let q2 = q_size as f64 * q_size as f64;
    let residue = smallest_magnitude_residue(p as i128 * y as i128, q_size)
        .expect("register size is positive");
    if residue == 0 {
        let num = r as u128 * (q as u128 + 1).pow(2) + (p - r) as u128 * (q as u128).pow(2);
        return num as f64 / q2;
    }
    let t = PI * residue as f64 / q_size as f64;
    let long = (t * (q + 1) as f64).sin().powi(2);
    let short = (t * q as f64).sin().powi(2);
    (r as f64 * long + (p - r) as f64 * short) / (q2 * t.sin().powi(2))
}

pub fn closed_form_distribution(params: &ClosedFormParams) -> OutcomeDistribution {
    OutcomeDistribution::from_probs(
        (0..params.register_size)
            .map(|y| closed_form_prob(y, params))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    /// `|sum_{k < terms} omega^{P y k}|^2` summed term by term.
    fn geometric_norm_sqr(p: u64, y: u64, q: u64, terms: u64) -> f64 {
        let step = (p as u128 * y as u128 % q as u128) as u64;
        (0..terms)
            .map(|k| {
                let e = (step as u128 * k as u128 % q as u128) as f64;
                Complex64::from_polar(1.0, 2.0 * PI * e / q as f64)
            })
            .sum::<Complex64>()
            .norm_sqr()
    }

    #[test]
    fn params_examples() {
        let c = closed_form_params(6, 16384).unwrap();
        assert_eq!(
            (c.quotient(), c.remainder(), c.truncated()),
            (2730, 4, 16380)
        );
        let c = closed_form_params(4, 256).unwrap();
        assert_eq!((c.quotient(), c.remainder(), c.truncated()), (64, 0, 256));
        let c = closed_form_params(1, 16).unwrap();
        assert_eq!((c.quotient(), c.remainder(), c.truncated()), (16, 0, 16));
        assert_eq!(closed_form_params(0, 16), Err(Error::ZeroPeriod));
    }

    #[test]
    fn worked_example_value() {
        let c = closed_form_params(6, 16384).unwrap();
        let p = closed_form_prob(13453, &c);
        // 10 significant digits as printed, truncated
        assert_eq!((p * 1e16).trunc(), 3_189_335_551.0);
        assert!((p - 3.189_335_551_743e-7).abs() < 1e-18);
    }

    #[test]
    fn zero_outcome_branch() {
        let c = closed_form_params(6, 16384).unwrap();
        assert_eq!(closed_form_prob(0, &c), 44_739_244.0 / (16384.0 * 16384.0));
    }

    #[test]
    fn exact_divisor_gives_uniform_peaks() {
        let c = closed_form_params(4, 256).unwrap();
        let d = closed_form_distribution(&c);
        let nonzero: Vec<u64> = (0..256).filter(|&y| d.prob(y) > 1e-12).collect();
        assert_eq!(nonzero, [0, 64, 128, 192]);
        for y in nonzero {
            assert!((d.prob(y) - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn unit_period_is_point_mass() {
        let d = closed_form_distribution(&closed_form_params(1, 16).unwrap());
        assert_eq!(d.prob(0), 1.0);
        assert!((1..16).all(|y| d.prob(y).abs() < 1e-15));
    }

    #[test]
    fn distribution_sums_to_one() {
        let d = closed_form_distribution(&closed_form_params(6, 16384).unwrap());
        assert!((d.total() - 1.0).abs() < 1e-9);
        assert!(d.probs().iter().all(|&p| p >= 0.0));
    }

    #[test]
    fn sine_form_matches_geometric_sums() {
        for (p, q_size) in [(6u64, 16384u64), (4, 256), (6, 512), (12, 2048), (5, 64)] {
            let c = closed_form_params(p, q_size).unwrap();
            for y in 0..q_size {
                if (p * y) % q_size == 0 {
                    continue;
                }
                let direct = (c.remainder() as f64
                    * geometric_norm_sqr(p, y, q_size, c.quotient() + 1)
                    + (p - c.remainder()) as f64 * geometric_norm_sqr(p, y, q_size, c.quotient()))
                    / (q_size as f64).powi(2);
                let formula = closed_form_prob(y, &c);
                let scale = direct.abs().max(1e-300);
                assert!(
                    (formula - direct).abs() <= 1e-6 * scale || (formula - direct).abs() < 1e-16,
                    "P={p} Q={q_size} y={y}: {formula} vs {direct}"
                );
            }
        }
    }
}

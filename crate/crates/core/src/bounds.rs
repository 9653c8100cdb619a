//! Success-probability bounds for period recovery, and the `d(y)`/`y(d)`
//! correspondence between well-placed outcomes and fractions `d/P`.

use std::f64::consts::{LN_2, PI};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::number_theory::{euler_totient, round_half_up, smallest_magnitude_residue};

/// Euler's constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `e^{-gamma}`, the liminf of `phi(n) ln ln n / n`.
pub const EXP_NEG_GAMMA: f64 = 0.561_459_483_6;

/// Constant in the large-period bound `0.232 / lg lg N * (1 - 1/N)^2`, valid
/// for periods above 3.
pub const ASYMPTOTIC_CONSTANT: f64 = 0.232;

/// Tabulated lower bounds `LB(P)` on `phi(P) ln ln P / P`.
pub const TOTIENT_LOWER_BOUNDS: [(u64, f64); 11] = [
    (3, 0.062),
    (4, 0.163),
    (5, 0.194),
    (7, 0.303),
    (13, 0.326),
    (31, 0.375),
    (61, 0.383),
    (211, 0.411),
    (421, 0.425),
    (631, 0.435),
    (841, 0.468),
];

fn deficiency(n: u64) -> f64 {
    let x = 1.0 - 1.0 / n as f64;
    x * x
}

fn lg_lg(n: u64) -> f64 {
    (n as f64).log2().log2()
}

/// `(4/pi^2) * (phi(P)/P) * (1 - 1/N)^2`.
pub fn success_lower_bound(period: u64, modulus: u64) -> Result<f64> {
    if modulus < 2 {
        return Err(Error::ModulusTooSmall(modulus));
    }
    let phi = euler_totient(period)?;
    Ok(4.0 / (PI * PI) * (phi as f64 / period as f64) * deficiency(modulus))
}

/// Lower bound on `Prob(y)` for a single outcome, given `{P y}_Q`.
///
/// `Some` only inside the region where the bound holds:
/// `{P y}_Q = 0` or `0 < |{P y}_Q| <= (P/2)(1 - 1/N)`.
pub fn pointwise_lower_bound(period: u64, modulus: u64, residue: i128) -> Option<f64> {
    let p = period as f64;
    if residue == 0 {
        return Some(deficiency(modulus) / p);
    }
    let limit = p / 2.0 * (1.0 - 1.0 / modulus as f64);
    (residue.unsigned_abs() as f64 <= limit).then(|| 4.0 / (PI * PI) / p * deficiency(modulus))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum AsymptoticBound {
    /// `0.232 / lg lg N * (1 - 1/N)^2`, for `P > 3`.
    Constant { value: f64 },
    /// `4 / (pi^2 ln 2) * LB(P) / lg lg N * (1 - 1/N)^2`, for small tabulated `P`.
    TableRow { period: u64, lb: f64, value: f64 },
    /// No bound is available for this period.
    Unavailable,
}

impl AsymptoticBound {
    pub fn value(&self) -> Option<f64> {
        match *self {
            AsymptoticBound::Constant { value } | AsymptoticBound::TableRow { value, .. } => {
                Some(value)
            }
            AsymptoticBound::Unavailable => None,
        }
    }
}

/// Bound in terms of `lg lg N`. The constant 0.232 assumes `P > 3`; for
/// smaller periods the tabulated `LB(P)` row is used when one exists.
pub fn asymptotic_success_bound(period: u64, modulus: u64) -> AsymptoticBound {
    if modulus < 5 {
        // lg lg N <= 1 gives no meaningful bound
        return AsymptoticBound::Unavailable;
    }
    let scale = deficiency(modulus) / lg_lg(modulus);
    if period > 3 {
        return AsymptoticBound::Constant {
            value: ASYMPTOTIC_CONSTANT * scale,
        };
    }
    match TOTIENT_LOWER_BOUNDS.iter().find(|row| row.0 == period) {
        Some(&(p, lb)) => AsymptoticBound::TableRow {
            period: p,
            lb,
            value: 4.0 / (PI * PI * LN_2) * lb * scale,
        },
        None => AsymptoticBound::Unavailable,
    }
}

/// `d(y) = round(P y / Q)`, ties up.
pub fn nearest_numerator(period: u64, register_size: u64, y: u64) -> u64 {
    round_half_up(period as u128 * y as u128, register_size as u128) as u64
}

/// `y(d) = round(Q d / P)`, ties up.
pub fn nearest_outcome(period: u64, register_size: u64, d: u64) -> u64 {
    round_half_up(register_size as u128 * d as u128, period as u128) as u64
}

/// `{P y}_Q`.
pub fn centered_residue(period: u64, register_size: u64, y: u64) -> i128 {
    smallest_magnitude_residue(period as i128 * y as i128, register_size)
        .expect("register size is positive")
}

/// Whether `|{P y}_Q| <= P/2`.
pub fn in_lemma_set(period: u64, register_size: u64, y: u64) -> bool {
    2 * centered_residue(period, register_size, y).unsigned_abs() <= period as u128
}

/// All outcomes `y` in `S_Q` with `|{P y}_Q| <= P/2`, ascending.
///
/// Walks the candidates `round(Q d / P) +- 1` for each `d` rather than all of
/// `S_Q`; [`in_lemma_set`] remains the defining predicate.
pub fn lemma_set(period: u64, register_size: u64) -> Vec<u64> {
    let mut ys: Vec<u64> = (0..=period)
        .flat_map(|d| {
            let c = nearest_outcome(period, register_size, d);
            [c.saturating_sub(1), c, c + 1]
        })
        .filter(|&y| y < register_size && in_lemma_set(period, register_size, y))
        .collect();
    ys.sort_unstable();
    ys.dedup();
    ys
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_examples() {
        let b = success_lower_bound(6, 91).unwrap();
        assert!((b - 4.0 / (PI * PI) / 3.0 * (90.0f64 / 91.0).powi(2)).abs() < 1e-15);
        assert!((b - 0.13214).abs() < 1e-4);
        let b1 = success_lower_bound(1, 15).unwrap();
        assert!((b1 - 4.0 / (PI * PI) * (14.0f64 / 15.0).powi(2)).abs() < 1e-15);
        assert_eq!(success_lower_bound(0, 15), Err(Error::ZeroTotient));
    }

    #[test]
    fn large_period_constant_near_eight_percent() {
        let b = asymptotic_success_bound(6, 91);
        let v = b.value().unwrap();
        assert!(matches!(b, AsymptoticBound::Constant { .. }));
        assert!((v - 0.084).abs() < 5e-4, "{v}");
    }

    #[test]
    fn small_periods_use_table_or_nothing() {
        assert!(matches!(
            asymptotic_success_bound(3, 91),
            AsymptoticBound::TableRow { period: 3, .. }
        ));
        assert_eq!(
            asymptotic_success_bound(2, 91),
            AsymptoticBound::Unavailable
        );
        assert_eq!(asymptotic_success_bound(6, 3), AsymptoticBound::Unavailable);
    }

    #[test]
    fn table_rows_hold() {
        for (p, lb) in TOTIENT_LOWER_BOUNDS {
            let phi = euler_totient(p).unwrap() as f64;
            let ratio = phi * (p as f64).ln().ln() / p as f64;
            assert!(ratio >= lb - 1e-3, "P = {p}: {ratio} < {lb}");
        }
    }

    #[test]
    fn worked_example_numerator() {
        assert_eq!(nearest_numerator(6, 16384, 13453), 5);
        assert_eq!(centered_residue(6, 16384, 13453), -1202);
        assert!(!in_lemma_set(6, 16384, 13453));
        assert!(in_lemma_set(6, 16384, 2731));
        assert_eq!(nearest_numerator(6, 16384, 2731), 1);
    }

    #[test]
    fn lemma_set_matches_exhaustive_scan() {
        for (p, q) in [
            (6u64, 16384u64),
            (4, 256),
            (6, 512),
            (12, 2048),
            (7, 64),
            (1, 16),
        ] {
            let scan: Vec<u64> = (0..q).filter(|&y| in_lemma_set(p, q, y)).collect();
            assert_eq!(lemma_set(p, q), scan, "P={p} Q={q}");
            assert_eq!(scan.len() as u64, p);
        }
    }

    #[test]
    fn pointwise_region() {
        assert!(pointwise_lower_bound(6, 91, 0).is_some());
        assert!(pointwise_lower_bound(6, 91, 2).is_some());
        assert!(pointwise_lower_bound(6, 91, -2).is_some());
        assert!(pointwise_lower_bound(6, 91, 3).is_none());
    }
}

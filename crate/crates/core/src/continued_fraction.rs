//! Finite simple continued fractions of non-negative rationals.
//!
//! The real-valued recurrence `a_{n+1} = floor(1/xi_n)`, `xi_{n+1} = 1/xi_n - a_{n+1}`
//! is carried out exactly as the Euclidean quotient/remainder sequence on the
//! numerator and denominator, so no coefficient is ever mis-rounded.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::number_theory::gcd;

/// Expansion `[a_0; a_1, ..., a_N]` of `numerator / denominator` together with
/// every convergent `p_n / q_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CFExpansion {
    numerator: u64,
    denominator: u64,
    coefficients: Vec<u64>,
    convergents: Vec<(u64, u64)>,
}

impl CFExpansion {
    pub fn numerator(&self) -> u64 {
        self.numerator
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    pub fn coefficients(&self) -> &[u64] {
        &self.coefficients
    }

    pub fn convergents(&self) -> &[(u64, u64)] {
        &self.convergents
    }

    /// Index of the last coefficient (the `N` in `[a_0, ..., a_N]`).
    pub fn last_index(&self) -> usize {
        self.coefficients.len() - 1
    }
}

pub fn cf_expand(numerator: u64, denominator: u64) -> Result<CFExpansion> {
    if denominator == 0 {
        return Err(Error::ZeroDenominator);
    }
    let mut coefficients = Vec::new();
    let (mut num, mut den) = (numerator, denominator);
    loop {
        coefficients.push(num / den);
        let rem = num % den;
        if rem == 0 {
            break;
        }
        (num, den) = (den, rem);
    }
    let convergents = convergents_from(&coefficients);
    Ok(CFExpansion {
        numerator,
        denominator,
        coefficients,
        convergents,
    })
}

/// `p_0 = a_0, p_1 = a_1 a_0 + 1, q_0 = 1, q_1 = a_1`, then
/// `p_n = a_n p_{n-1} + p_{n-2}` and likewise for `q_n`.
fn convergents_from(a: &[u64]) -> Vec<(u64, u64)> {
    let mut out: Vec<(u64, u64)> = Vec::with_capacity(a.len());
    for (n, &an) in a.iter().enumerate() {
        let next = match n {
            0 => (an, 1),
            1 => (an * a[0] + 1, an),
            _ => {
                let (p1, q1) = out[n - 1];
                let (p2, q2) = out[n - 2];
                (an * p1 + p2, an * q1 + q2)
            }
        };
        out.push(next);
    }
    out
}

pub fn convergents_of(expansion: &CFExpansion) -> Vec<(u64, u64)> {
    expansion.convergents.clone()
}

/// Whether `a/b`, reduced to lowest terms, is a convergent of
/// `numerator / denominator`. A zero `b` or `denominator` yields `false`.
pub fn is_convergent(a: u64, b: u64, numerator: u64, denominator: u64) -> bool {
    if b == 0 {
        return false;
    }
    let Ok(expansion) = cf_expand(numerator, denominator) else {
        return false;
    };
    let g = gcd(a, b);
    let target = (a / g, b / g);
    expansion.convergents.contains(&target)
}

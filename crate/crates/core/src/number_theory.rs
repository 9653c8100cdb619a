//! Exact integer primitives and brute-force classical oracles.
//!
//! Values are `u64`. Every product goes through `u128`, so nothing here can
//! wrap for moduli below 2^64; the desk-scale limits elsewhere keep `N` far
//! below that.

use std::collections::BTreeSet;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Largest modulus decided by trial division instead of random bases.
const TRIAL_DIVISION_LIMIT: u64 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PrimalityVerdict {
    ProbablePrime {
        error_bound: f64,
    },
    /// `witness` is a base for which the Miller-Rabin round fails.
    Composite {
        witness: u64,
    },
}

impl PrimalityVerdict {
    pub fn is_probable_prime(&self) -> bool {
        matches!(self, PrimalityVerdict::ProbablePrime { .. })
    }
}

pub fn gcd_euclid(a: u64, b: u64) -> Result<u64> {
    if a == 0 && b == 0 {
        return Err(Error::GcdOfZeros);
    }
    let (mut a, mut b) = (a, b);
    while b != 0 {
        (a, b) = (b, a % b);
    }
    Ok(a)
}

/// gcd without the domain check; `gcd(0, 0) = 0`.
pub(crate) fn gcd(a: u64, b: u64) -> u64 {
    gcd_euclid(a, b).unwrap_or(0)
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

/// `m^e mod n` by square-and-multiply over the binary digits of `e`.
pub fn mod_pow(m: u64, e: u64, n: u64) -> Result<u64> {
    if n < 2 {
        return Err(Error::ModulusTooSmall(n));
    }
    Ok(pow_mod_unchecked(m, e, n))
}

pub(crate) fn pow_mod_unchecked(m: u64, mut e: u64, n: u64) -> u64 {
    let mut base = m % n;
    let mut acc = 1 % n;
    while e != 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base, n);
        }
        base = mul_mod(base, base, n);
        e >>= 1;
    }
    acc
}

/// Runs one Miller-Rabin round: `true` when `base` proves `n` composite.
///
/// `n` must be at least 3; `n - 1 = d * 2^s` with `d` odd.
pub fn is_miller_rabin_witness(n: u64, base: u64) -> bool {
    if n.is_multiple_of(2) {
        // n - 1 is odd, so s = 0 and the round reduces to Fermat's test.
        return pow_mod_unchecked(base, n - 1, n) != 1;
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    let mut x = pow_mod_unchecked(base, d, n);
    if x == 1 || x == n - 1 {
        return false;
    }
    for _ in 1..s {
        x = mul_mod(x, x, n);
        if x == n - 1 {
            return false;
        }
    }
    true
}

/// Miller-Rabin with `rounds` uniformly random bases in `[2, n-2]`.
///
/// Moduli below 100 are decided by trial division; composite ones still get
/// a genuine Miller-Rabin witness attached.
pub fn miller_rabin<R: Rng + ?Sized>(n: u64, rounds: u32, rng: &mut R) -> Result<PrimalityVerdict> {
    if n < 2 {
        return Err(Error::ModulusTooSmall(n));
    }
    if rounds == 0 {
        return Err(Error::NoRounds);
    }
    let prime = PrimalityVerdict::ProbablePrime {
        error_bound: 0.5f64.powi(rounds as i32),
    };
    if n < TRIAL_DIVISION_LIMIT {
        if (2..n)
            .take_while(|k| k * k <= n)
            .any(|k| n.is_multiple_of(k))
        {
            let witness = (2..=n.saturating_sub(2).max(2))
                .find(|&a| is_miller_rabin_witness(n, a))
                .expect("every composite below 100 has a witness in [2, n-2]");
            return Ok(PrimalityVerdict::Composite { witness });
        }
        return Ok(prime);
    }
    for _ in 0..rounds {
        let base = rng.gen_range(2..=n - 2);
        if is_miller_rabin_witness(n, base) {
            return Ok(PrimalityVerdict::Composite { witness: base });
        }
    }
    Ok(prime)
}

/// Smallest `p >= 1` with `m^p = 1 mod n`, by successive multiplication.
pub fn multiplicative_order(m: u64, n: u64) -> Result<u64> {
    if n < 2 {
        return Err(Error::ModulusTooSmall(n));
    }
    if gcd(m, n) != 1 {
        return Err(Error::NotCoprime {
            value: m,
            modulus: n,
        });
    }
    let base = m % n;
    let mut acc = base;
    let mut order = 1;
    while acc != 1 {
        acc = mul_mod(acc, base, n);
        order += 1;
    }
    Ok(order)
}

/// Euler's totient by counting units; `phi(1) = 1`.
pub fn euler_totient(p: u64) -> Result<u64> {
    match p {
        0 => Err(Error::ZeroTotient),
        1 => Ok(1),
        _ => Ok((1..p).filter(|&k| gcd(k, p) == 1).count() as u64),
    }
}

/// Distinct prime divisors by trial division.
pub fn distinct_prime_factors(n: u64) -> Result<BTreeSet<u64>> {
    if n < 2 {
        return Err(Error::ModulusTooSmall(n));
    }
    let mut rest = n;
    let mut primes = BTreeSet::new();
    let mut k = 2u64;
    while k.saturating_mul(k) <= rest {
        if rest.is_multiple_of(k) {
            primes.insert(k);
            while rest.is_multiple_of(k) {
                rest /= k;
            }
        }
        k += if k == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        primes.insert(rest);
    }
    Ok(primes)
}

/// The residue of `a` modulo `q` of smallest magnitude, in `(-q/2, q/2]`.
///
/// Computed as `a - q * ceil(a/q - 1/2)`, i.e. `floor((2a + q - 1) / 2q)` in
/// integer arithmetic. Away from the boundary this agrees with
/// `floor(a/q + 1/2)`; at `a = q/2 (mod q)` it keeps `+q/2` rather than `-q/2`.
pub fn smallest_magnitude_residue(a: i128, q: u64) -> Result<i128> {
    if q == 0 {
        return Err(Error::ZeroDenominator);
    }
    let q = q as i128;
    // ceil(a/Q - 1/2) so the boundary value Q/2 maps to +Q/2
    Ok(a - q * (2 * a + q - 1).div_euclid(2 * q))
}

/// `round(num / den)` with ties rounded up, for non-negative operands.
pub(crate) fn round_half_up(num: u128, den: u128) -> u128 {
    (2 * num + den) / (2 * den)
}

/// Returns `(base, exponent)` with `exponent >= 2` when `n = base^exponent`.
pub fn perfect_power(n: u64) -> Option<(u64, u32)> {
    if n < 4 {
        return None;
    }
    let max_exp = 63 - n.leading_zeros();
    (2..=max_exp).find_map(|k| {
        let root = integer_root(n, k);
        (checked_pow(root, k) == Some(n)).then_some((root, k))
    })
}

/// `floor(n^(1/k))` for `k >= 1`.
pub fn integer_root(n: u64, k: u32) -> u64 {
    if k == 1 || n < 2 {
        return n;
    }
    let mut r = (n as f64).powf(1.0 / k as f64).round() as u64;
    while checked_pow(r, k).is_none_or(|v| v > n) {
        r -= 1;
    }
    while checked_pow(r + 1, k).is_some_and(|v| v <= n) {
        r += 1;
    }
    r
}

fn checked_pow(base: u64, exp: u32) -> Option<u64> {
    base.checked_pow(exp)
}

//! End-to-end replay of the N = 91 worked example, diffed field by field
//! against the published values.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::bounds::{asymptotic_success_bound, nearest_numerator};
use crate::continued_fraction::cf_expand;
use crate::engine::{closed_form_params, closed_form_prob, ModExpFunction};
use crate::error::Result;
use crate::number_theory::{gcd_euclid, mod_pow, multiplicative_order};
use crate::pipeline::{shor_factor, ShorConfig, StepOutcome};

/// Published values for the worked example.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkedExample {
    pub n: u64,
    pub m: u64,
    pub register_size: u64,
    pub qubits: u32,
    pub y: u64,
    pub gcd_n_m: u64,
    pub f_values: Vec<u64>,
    pub period: u64,
    /// Printed to 10 significant digits.
    pub probability: f64,
    pub numerator: u64,
    pub a: Vec<u64>,
    pub p: Vec<u64>,
    pub q: Vec<u64>,
    /// `(n, q_n, m^{q_n} mod N)` for the rejected and the accepted convergent.
    pub rejected: (usize, u64, u64),
    pub accepted: (usize, u64, u64),
    pub half_power: u64,
    pub gcd_argument: u64,
    pub factor: u64,
    /// The `0.232 / lg lg N` floor, printed as a percentage to one decimal.
    pub success_floor_percent: f64,
}

impl Default for WorkedExample {
    fn default() -> Self {
        WorkedExample {
            n: 91,
            m: 3,
            register_size: 16384,
            qubits: 14,
            y: 13453,
            gcd_n_m: 1,
            f_values: vec![1, 3, 9, 27, 81, 61, 1, 3],
            period: 6,
            probability: 0.318_933_555_1e-6,
            numerator: 5,
            a: vec![0, 1, 4, 1, 1, 2, 3, 1, 1, 3, 1, 1, 1, 1, 3],
            p: vec![
                0, 1, 4, 5, 9, 23, 78, 101, 179, 638, 817, 1455, 2272, 3727, 13453,
            ],
            q: vec![
                1, 1, 5, 6, 11, 28, 95, 123, 218, 777, 995, 1772, 2767, 4539, 16384,
            ],
            rejected: (2, 5, 61),
            accepted: (3, 6, 1),
            half_power: 27,
            gcd_argument: 26,
            factor: 13,
            success_floor_percent: 8.4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldCheck {
    pub field: &'static str,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicationReport {
    pub checks: Vec<FieldCheck>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl ReplicationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &FieldCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

struct Checks(Vec<FieldCheck>);

impl Checks {
    fn exact<T: PartialEq + std::fmt::Debug>(
        &mut self,
        field: &'static str,
        expected: T,
        actual: T,
    ) {
        self.0.push(FieldCheck {
            field,
            pass: expected == actual,
            expected: format!("{expected:?}"),
            actual: format!("{actual:?}"),
        });
    }

    /// Passes when `actual` agrees with `expected` to the printed precision:
    /// the difference is below one unit in the last printed digit.
    fn printed(&mut self, field: &'static str, expected: f64, actual: f64, last_digit: f64) {
        self.0.push(FieldCheck {
            field,
            pass: (actual - expected).abs() < last_digit,
            expected: format!("{expected:e}"),
            actual: format!("{actual:e}"),
        });
    }
}

pub fn replicate_worked_example(expected: &WorkedExample) -> Result<ReplicationReport> {
    let start = Instant::now();
    let mut checks = Checks(Vec::new());
    let e = expected;

    let config = ShorConfig {
        forced_m: Some(e.m),
        forced_y: Some(e.y),
        ..ShorConfig::default()
    };
    let (outcome, trace) = shor_factor(e.n, &config)?;
    checks.exact("register_size", e.register_size, trace.register_size);
    checks.exact("qubits", e.qubits, trace.qubits);
    checks.exact("gcd(N, m)", e.gcd_n_m, gcd_euclid(e.n, e.m)?);

    let f = ModExpFunction::new(e.m, e.n)?;
    let f_values: Vec<u64> = (0..e.f_values.len() as u64).map(|a| f.eval(a)).collect();
    checks.exact("f(a) for a = 0..7", e.f_values.clone(), f_values);
    checks.exact(
        "period (order oracle)",
        e.period,
        multiplicative_order(e.m, e.n)?,
    );

    let attempt = &trace.attempts[0];
    let measurement = attempt.measurement.as_ref();
    checks.exact("measured y", Some(e.y), measurement.map(|mm| mm.y));
    let simulated = measurement.map_or(f64::NAN, |mm| mm.probability);
    let closed = closed_form_prob(e.y, &closed_form_params(e.period, e.register_size)?);
    checks.printed("Prob(y) simulated", e.probability, simulated, 1e-16);
    checks.printed("Prob(y) closed form", e.probability, closed, 1e-16);
    checks.exact(
        "d(y)",
        e.numerator,
        nearest_numerator(e.period, e.register_size, e.y),
    );

    let cf = cf_expand(e.y, e.register_size)?;
    checks.exact("a_n", e.a.clone(), cf.coefficients().to_vec());
    checks.exact(
        "p_n",
        e.p.clone(),
        cf.convergents().iter().map(|c| c.0).collect(),
    );
    checks.exact(
        "q_n",
        e.q.clone(),
        cf.convergents().iter().map(|c| c.1).collect(),
    );

    let tests: Vec<(usize, u64, u64)> = measurement
        .map(|mm| {
            mm.convergent_tests
                .iter()
                .map(|t| (t.n, t.q_n, t.residue))
                .collect()
        })
        .unwrap_or_default();
    checks.exact(
        "rejected convergent",
        Some(e.rejected),
        tests.iter().rev().nth(1).copied(),
    );
    checks.exact(
        "accepted convergent",
        Some(e.accepted),
        tests.last().copied(),
    );
    checks.exact("recovered period", Some(e.period), attempt.period);
    checks.exact("m^(P/2) mod N", Some(e.half_power), attempt.half_power);
    checks.exact(
        "m^(P/2) - 1",
        e.gcd_argument,
        mod_pow(e.m, e.period / 2, e.n)? - 1,
    );
    checks.exact(
        "gcd(m^(P/2) - 1, N)",
        e.factor,
        gcd_euclid(e.gcd_argument, e.n)?,
    );
    checks.exact("outcome", StepOutcome::FactorFound(e.factor), outcome);
    let floor = asymptotic_success_bound(e.period, e.n)
        .value()
        .unwrap_or(f64::NAN);
    checks.printed(
        "success floor (%)",
        e.success_floor_percent,
        100.0 * floor,
        0.05,
    );

    Ok(ReplicationReport {
        checks: checks.0,
        elapsed: start.elapsed(),
    })
}

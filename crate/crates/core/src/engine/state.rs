use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;

use super::distribution::OutcomeDistribution;
use super::qft::Radix2Plan;
use super::{ModExpFunction, RegisterGeometry};
use crate::error::{Error, Result};

/// Sparse amplitudes over the two-register basis `|x>|v>`.
///
/// Amplitudes are grouped by the register-2 value `v`; each group holds the
/// register-1 entries `(x, amplitude)` sorted by `x`. Only a handful of `v`
/// values are ever occupied, so the `Q x Q` joint space is never
/// materialized.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    geometry: RegisterGeometry,
    columns: BTreeMap<u64, Vec<(u64, Complex64)>>,
}

impl JointState {
    /// Builds a state from explicit `((x, v), amplitude)` entries. Repeated
    /// kets are summed; no normalization is applied.
    pub fn from_entries<I>(geometry: RegisterGeometry, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = ((u64, u64), Complex64)>,
    {
        let q = geometry.register_size();
        let mut columns: BTreeMap<u64, BTreeMap<u64, Complex64>> = BTreeMap::new();
        for ((x, v), amp) in entries {
            for idx in [x, v] {
                if idx >= q {
                    return Err(Error::OutcomeOutOfRange { y: idx, q });
                }
            }
            *columns.entry(v).or_default().entry(x).or_default() += amp;
        }
        Ok(JointState {
            geometry,
            columns: columns
                .into_iter()
                .map(|(v, col)| (v, col.into_iter().collect()))
                .collect(),
        })
    }

    pub fn geometry(&self) -> RegisterGeometry {
        self.geometry
    }

    pub fn amplitude(&self, x: u64, v: u64) -> Complex64 {
        self.columns
            .get(&v)
            .and_then(|col| col.binary_search_by_key(&x, |e| e.0).ok().map(|i| col[i].1))
            .unwrap_or_default()
    }

    /// Iterates `((x, v), amplitude)` ordered by `v`, then `x`.
    pub fn entries(&self) -> impl Iterator<Item = ((u64, u64), Complex64)> + '_ {
        self.columns
            .iter()
            .flat_map(|(&v, col)| col.iter().map(move |&(x, a)| ((x, v), a)))
    }

    /// Number of stored amplitudes.
    pub fn len(&self) -> usize {
        self.columns.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn occupied_register2_values(&self) -> usize {
        self.columns.len()
    }

    pub fn register2_values(&self) -> impl Iterator<Item = u64> + '_ {
        self.columns.keys().copied()
    }

    /// Register-1 amplitudes paired with register-2 value `v`.
    pub fn column(&self, v: u64) -> &[(u64, Complex64)] {
        self.columns.get(&v).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries().map(|(_, a)| a.norm_sqr()).sum()
    }
}

/// `|0>|0>`.
pub fn initialize(geometry: RegisterGeometry) -> JointState {
    JointState {
        geometry,
        columns: BTreeMap::from([(0, vec![(0, Complex64::new(1.0, 0.0))])]),
    }
}

/// Applies the `Q`-point transform to register 1, independently for every
/// register-2 value.
pub fn apply_qft_reg1(state: JointState) -> JointState {
    let q = state.geometry.register_size() as usize;
    let plan = Radix2Plan::new(q);
    let mut buf = vec![Complex64::default(); q];
    let columns = state
        .columns
        .into_iter()
        .map(|(v, col)| {
            buf.fill(Complex64::default());
            for (x, a) in col {
                buf[x as usize] = a;
            }
            plan.process(&mut buf);
            let transformed = buf
                .iter()
                .enumerate()
                .filter(|(_, a)| **a != Complex64::default())
                .map(|(y, &a)| (y as u64, a))
                .collect();
            (v, transformed)
        })
        .collect();
    JointState {
        geometry: state.geometry,
        columns,
    }
}

/// `U_f |x>|l> = |x>|f(x) - l mod N>`, an involutive basis permutation.
pub fn apply_modexp_entangler(state: JointState, f: &ModExpFunction) -> Result<JointState> {
    let n = f.modulus();
    if let Some(&v) = state.columns.keys().find(|&&v| v >= n) {
        return Err(Error::Register2OutOfRange {
            value: v,
            modulus: n,
        });
    }
    let mut columns: BTreeMap<u64, Vec<(u64, Complex64)>> = BTreeMap::new();
    for (l, col) in state.columns {
        for (x, a) in col {
            let target = (f.eval(x) + n - l) % n;
            columns.entry(target).or_default().push((x, a));
        }
    }
    for col in columns.values_mut() {
        col.sort_unstable_by_key(|e| e.0);
    }
    Ok(JointState {
        geometry: state.geometry,
        columns,
    })
}

/// Outcome probabilities for measuring register 1:
/// `probs[y] = sum_v |amp(y, v)|^2`, accumulated in ascending `v`.
pub fn reg1_distribution(state: &JointState) -> OutcomeDistribution {
    let mut probs = vec![0.0; state.geometry.register_size() as usize];
    for col in state.columns.values() {
        for &(x, a) in col {
            probs[x as usize] += a.norm_sqr();
        }
    }
    OutcomeDistribution::from_probs(probs)
}

/// Measures register 1, sampling `y0` by inverse CDF and collapsing the
/// state onto `|y0>` (renormalized).
pub fn measure_reg1<R: Rng + ?Sized>(state: JointState, rng: &mut R) -> (u64, JointState) {
    let y0 = reg1_distribution(&state).sampler().sample(rng);
    let collapsed = collapse(state, y0).expect("sampled outcomes have positive probability");
    (y0, collapsed)
}

/// Measurement with a prescribed outcome, for replaying a known run.
pub fn measure_reg1_forced(state: JointState, y0: u64) -> Result<(u64, JointState)> {
    let q = state.geometry.register_size();
    if y0 >= q {
        return Err(Error::OutcomeOutOfRange { y: y0, q });
    }
    Ok((y0, collapse(state, y0)?))
}

fn collapse(state: JointState, y0: u64) -> Result<JointState> {
    let mut columns: BTreeMap<u64, Vec<(u64, Complex64)>> = BTreeMap::new();
    let mut norm_sqr = 0.0;
    for (v, col) in state.columns {
        if let Ok(i) = col.binary_search_by_key(&y0, |e| e.0) {
            let a = col[i].1;
            norm_sqr += a.norm_sqr();
            columns.insert(v, vec![(y0, a)]);
        }
    }
    if norm_sqr == 0.0 {
        return Err(Error::ZeroProbabilityOutcome(y0));
    }
    let scale = 1.0 / norm_sqr.sqrt();
    for col in columns.values_mut() {
        col[0].1 *= scale;
    }
    Ok(JointState {
        geometry: state.geometry,
        columns,
    })
}

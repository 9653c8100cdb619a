//! Two-register simulation of the period-finding subroutine.
//!
//! [`JointState`] evolves exactly through initialization, the Fourier
//! transform on register 1, the modular-exponentiation entangler and a second
//! transform. [`closed_form`] gives the same outcome distribution analytically
//! from the period; the two must agree.

pub mod closed_form;
mod distribution;
mod qft;
mod state;

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::number_theory::{gcd, pow_mod_unchecked};

pub use closed_form::{
    closed_form_distribution, closed_form_params, closed_form_prob, ClosedFormParams,
};
pub use distribution::{InverseCdf, OutcomeDistribution};
pub use qft::Radix2Plan;
pub use state::{
    apply_modexp_entangler, apply_qft_reg1, initialize, measure_reg1, measure_reg1_forced,
    reg1_distribution, JointState,
};

/// Default upper bound on the modulus accepted by [`choose_geometry`].
pub const DEFAULT_MAX_MODULUS: u64 = 1_000_000;

/// Default cap on stored amplitudes for a full simulation (register-1 size
/// times the number of occupied register-2 values).
pub const DEFAULT_MAX_AMPLITUDES: u64 = 1 << 24;

/// Register size `Q = 2^L` for a modulus `N`, with `N^2 <= Q < 2 N^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RegisterGeometry {
    modulus: u64,
    register_size: u64,
    qubits: u32,
}

impl RegisterGeometry {
    /// Accepts an explicit `Q`, which must still satisfy `N^2 <= Q < 2 N^2`.
    pub fn with_register_size(modulus: u64, register_size: u64) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::ModulusTooSmall(modulus));
        }
        let n2 = modulus as u128 * modulus as u128;
        let q = register_size as u128;
        if !register_size.is_power_of_two() || q < n2 || q >= 2 * n2 {
            return Err(Error::InvalidRegisterSize {
                n: modulus,
                q: register_size,
            });
        }
        Ok(RegisterGeometry {
            modulus,
            register_size,
            qubits: register_size.trailing_zeros(),
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// `Q`.
    pub fn register_size(&self) -> u64 {
        self.register_size
    }

    /// `L`, the qubit count of each register.
    pub fn qubits(&self) -> u32 {
        self.qubits
    }

    /// Angle of the primitive root of unity `omega = e^{2 pi i / Q}`.
    pub fn omega_angle(&self) -> f64 {
        2.0 * PI / self.register_size as f64
    }
}

pub fn choose_geometry(modulus: u64) -> Result<RegisterGeometry> {
    choose_geometry_with_limit(modulus, DEFAULT_MAX_MODULUS)
}

pub fn choose_geometry_with_limit(modulus: u64, max_modulus: u64) -> Result<RegisterGeometry> {
    if modulus < 2 {
        return Err(Error::ModulusTooSmall(modulus));
    }
    if modulus > max_modulus {
        return Err(Error::Capacity {
            n: modulus,
            limit: max_modulus,
        });
    }
    let n2 = modulus as u128 * modulus as u128;
    let qubits = 128 - (n2 - 1).leading_zeros();
    RegisterGeometry::with_register_size(modulus, 1u64 << qubits)
}

/// `a -> m^a mod N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ModExpFunction {
    base: u64,
    modulus: u64,
}

impl ModExpFunction {
    pub fn new(base: u64, modulus: u64) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::ModulusTooSmall(modulus));
        }
        if gcd(base, modulus) != 1 {
            return Err(Error::NotCoprime {
                value: base,
                modulus,
            });
        }
        Ok(ModExpFunction { base, modulus })
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn eval(&self, a: u64) -> u64 {
        pow_mod_unchecked(self.base, a, self.modulus)
    }
}

/// Runs initialization, transform, entangler and transform, returning the
/// state just before register 1 is measured.
pub fn prepare_pre_measurement_state(
    geometry: RegisterGeometry,
    f: &ModExpFunction,
    max_amplitudes: u64,
) -> Result<JointState> {
    if f.modulus() != geometry.modulus() {
        return Err(Error::ModulusMismatch {
            geometry: geometry.modulus(),
            function: f.modulus(),
        });
    }
    let uniform = apply_qft_reg1(initialize(geometry));
    let entangled = apply_modexp_entangler(uniform, f)?;
    let needed = geometry.register_size() * entangled.occupied_register2_values() as u64;
    if needed > max_amplitudes {
        return Err(Error::StateTooLarge {
            needed,
            limit: max_amplitudes,
        });
    }
    Ok(apply_qft_reg1(entangled))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometry_examples() {
        let g = choose_geometry(91).unwrap();
        assert_eq!((g.register_size(), g.qubits()), (16384, 14));
        let g = choose_geometry(15).unwrap();
        assert_eq!((g.register_size(), g.qubits()), (256, 8));
        let g = choose_geometry(2).unwrap();
        assert_eq!((g.register_size(), g.qubits()), (4, 2));
        let g = choose_geometry(16).unwrap();
        assert_eq!(g.register_size(), 256);
        let g = choose_geometry(1_000_000).unwrap();
        assert_eq!(g.register_size(), 1 << 40);
    }

    #[test]
    fn geometry_rejections() {
        assert_eq!(
            choose_geometry(1_000_001),
            Err(Error::Capacity {
                n: 1_000_001,
                limit: DEFAULT_MAX_MODULUS
            })
        );
        assert_eq!(choose_geometry(1), Err(Error::ModulusTooSmall(1)));
        assert!(RegisterGeometry::with_register_size(91, 8192).is_err());
        assert!(RegisterGeometry::with_register_size(91, 32768).is_err());
        assert!(RegisterGeometry::with_register_size(91, 16383).is_err());
        assert!(RegisterGeometry::with_register_size(91, 16384).is_ok());
    }

    #[test]
    fn geometry_bracket_holds() {
        for n in 2..5000u64 {
            let q = choose_geometry(n).unwrap().register_size();
            assert!(n * n <= q && q < 2 * n * n, "n = {n}");
        }
    }

    #[test]
    fn modexp_function_values() {
        let f = ModExpFunction::new(3, 91).unwrap();
        let values: Vec<u64> = (0..8).map(|a| f.eval(a)).collect();
        assert_eq!(values, [1, 3, 9, 27, 81, 61, 1, 3]);
        assert!(ModExpFunction::new(7, 91).is_err());
    }

    #[test]
    fn state_size_limit() {
        let g = choose_geometry(91).unwrap();
        let f = ModExpFunction::new(3, 91).unwrap();
        assert_eq!(
            prepare_pre_measurement_state(g, &f, 1000).unwrap_err(),
            Error::StateTooLarge {
                needed: 6 * 16384,
                limit: 1000
            }
        );
    }
}

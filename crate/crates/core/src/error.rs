use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("gcd(0, 0) is undefined")]
    GcdOfZeros,

    #[error("modulus must be at least 2, got {0}")]
    ModulusTooSmall(u64),

    #[error("{value} is not a unit modulo {modulus}")]
    NotCoprime { value: u64, modulus: u64 },

    #[error("totient of zero is undefined")]
    ZeroTotient,

    #[error("zero denominator")]
    ZeroDenominator,

    #[error("period must be at least 1")]
    ZeroPeriod,

    #[error("miller-rabin needs at least one round")]
    NoRounds,

    #[error("modulus {n} exceeds the desk-scale limit {limit}")]
    Capacity { n: u64, limit: u64 },

    #[error("simulation needs {needed} amplitudes, limit is {limit}")]
    StateTooLarge { needed: u64, limit: u64 },

    #[error("Q = {q} is not a power of two with {n}^2 <= Q < 2*{n}^2")]
    InvalidRegisterSize { n: u64, q: u64 },

    #[error("function modulus {function} does not match register modulus {geometry}")]
    ModulusMismatch { geometry: u64, function: u64 },

    #[error("register-2 value {value} is not below the modulus {modulus}")]
    Register2OutOfRange { value: u64, modulus: u64 },

    #[error("outcome {y} is outside S_Q with Q = {q}")]
    OutcomeOutOfRange { y: u64, q: u64 },

    #[error("outcome {0} has zero probability")]
    ZeroProbabilityOutcome(u64),

    #[error("{period} is not a period of {base} modulo {modulus}")]
    NotAPeriod {
        base: u64,
        period: u64,
        modulus: u64,
    },

    #[error("modulus {0} is too small to factor (need N >= 3)")]
    ModulusTooSmallToFactor(u64),

    #[error("even modulus {0}")]
    EvenModulus(u64),

    #[error("input is probably prime: {0}")]
    ProbablyPrime(u64),

    #[error("perfect power: {n} = {base}^{exponent}")]
    PerfectPower { n: u64, base: u64, exponent: u32 },

    #[error("forced m = {m} is outside [2, {}]", .n - 1)]
    InvalidForcedBase { m: u64, n: u64 },

    #[error("trial count must be at least 1")]
    NoTrials,
}

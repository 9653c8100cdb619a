//! Fixed-precision number formatting for JSON and CSV output.

use serde::ser::Error as _;
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_prob(value: f64) -> String {
    format!("{value:.16e}")
}

pub(crate) fn prob17<S: Serializer>(value: &f64, serializer: S) -> Result<S::Ok, S::Error> {
    if !value.is_finite() {
        return Err(S::Error::custom("non-finite probability"));
    }
    RawValue::from_string(format_prob(*value))
        .map_err(S::Error::custom)?
        .serialize(serializer)
}

pub(crate) fn prob17_opt<S: Serializer>(
    value: &Option<f64>,
    serializer: S,
) -> Result<S::Ok, S::Error> {
    match value {
        Some(v) => prob17(v, serializer),
        None => serializer.serialize_none(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_through_text() {
        for v in [
            0.0,
            1.0,
            3.189_335_551_743_406e-7,
            1.0 / 3.0,
            f64::MIN_POSITIVE,
        ] {
            let s = format_prob(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
            let mantissa = s.split('e').next().unwrap();
            assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17);
        }
    }
}

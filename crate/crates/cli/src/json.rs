//! Real-number serialization with a fixed 17 significant digits.

use serde::ser::Error as _;
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

pub fn format_real(x: f64) -> Option<String> {
    x.is_finite().then(|| format!("{x:.16e}"))
}

/// `serialize_with` hook: finite values as `d.dddddddddddddddde±x`, anything
/// else as `null`.
pub fn real<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    match format_real(*x) {
        Some(text) => RawValue::from_string(text)
            .map_err(S::Error::custom)?
            .serialize(s),
        None => s.serialize_none(),
    }
}

//! Stable textual serialization.
//!
//! JSON with every float printed at 17 significant digits, which round-trips
//! any f64 exactly. Re-serializing equal values always produces identical
//! bytes, so files can be compared byte for byte.

use std::io;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::ser::Formatter;

use crate::error::{CoreError, Result};

struct SigDigits17;

impl Formatter for SigDigits17 {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.write_f64(writer, value as f64)
    }
}

/// Serialize to JSON with 17-significant-digit floats.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SigDigits17);
    value
        .serialize(&mut ser)
        .map_err(|e| CoreError::InvalidParameter(format!("serialization failed: {e}")))?;
    Ok(String::from_utf8(out).expect("serializer emits UTF-8"))
}

/// Parse a value previously written by [`to_json_string`] (or any JSON).
pub fn from_json_str<T: DeserializeOwned>(s: &str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| CoreError::InvalidParameter(format!("parse failed: {e}")))
}

/// Format one float at 17 significant digits (shared with CSV emission).
pub fn format_f64(value: f64) -> String {
    format!("{value:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::generate_random_cmdp;
    use crate::mdp::ContextualMdp;

    #[test]
    fn floats_round_trip_exactly() {
        let values = vec![0.1, 1.0 / 3.0, 2.0f64.powi(-53), 1.0, 0.0];
        let json = to_json_string(&values).unwrap();
        let back: Vec<f64> = from_json_str(&json).unwrap();
        assert_eq!(values, back);
    }

    #[test]
    fn cmdp_round_trip_is_byte_stable() {
        let cmdp = generate_random_cmdp(3, 2, 2, 5).unwrap();
        let a = to_json_string(&cmdp).unwrap();
        let back: ContextualMdp = from_json_str(&a).unwrap();
        let b = to_json_string(&back).unwrap();
        assert_eq!(a, b);
        assert_eq!(cmdp, back);
    }

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(format_f64(0.5), "5.0000000000000000e-1");
        assert_eq!(format_f64(1.0), "1.0000000000000000e0");
    }
}

//! JSON helpers: rational fields and deterministic number formatting.

use num::rational::Rational64;
use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::ratio::{format_ratio, parse_ratio, ratio_to_f64, rational_from_f64};

/// Canonical JSON form of a rational: "a" or "a/b" as a string.
pub fn ratio_value(r: Rational64) -> Value {
    Value::String(format_ratio(r))
}

/// Accept a rational given as a string ("3/2", "2") or a JSON number.
pub fn ratio_from_value(v: &Value) -> Result<Rational64> {
    match v {
        Value::String(s) => parse_ratio(s),
        Value::Number(n) => {
            let x = n
                .as_f64()
                .ok_or_else(|| Error::Parse(format!("bad number {n}")))?;
            rational_from_f64(x, 1e-12)
                .ok_or_else(|| Error::Parse(format!("{x} is not close to a small rational")))
        }
        other => Err(Error::Parse(format!("expected rational, got {other}"))),
    }
}

pub fn ratio_f64_from_value(v: &Value) -> Result<f64> {
    ratio_from_value(v).map(ratio_to_f64)
}

/// Formatter printing every float with 17 significant digits, so equal
/// inputs produce byte-identical files.
struct SeventeenDigits;

impl Formatter for SeventeenDigits {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

/// Serialize with the fixed float format, trailing newline included.
pub fn to_string_deterministic(value: &Value) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SeventeenDigits);
    value
        .serialize(&mut ser)
        .expect("serializing serde_json::Value cannot fail");
    out.push(b'\n');
    String::from_utf8(out).expect("serializer emits utf-8")
}

//! JSON output with stable layout.
//!
//! Floats are written in scientific notation with 17 significant digits,
//! which round-trips every finite `f64` exactly and keeps output byte-stable
//! across platforms. Key order follows struct field order.

use std::io;

use num_complex::Complex64;
use serde::ser::Serialize;
use serde::{Deserialize, Serialize as SerializeDerive};
use serde_json::ser::{Formatter, PrettyFormatter};

struct FixedDigits<'a> {
    inner: PrettyFormatter<'a>,
}

impl FixedDigits<'_> {
    fn write_float<W: ?Sized + io::Write>(writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }
}

impl Formatter for FixedDigits<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        Self::write_float(writer, value)
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        Self::write_float(writer, f64::from(value))
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_array(writer)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.inner.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object(writer)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.inner.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object_value(writer)
    }
}

/// Serializes `value` as indented JSON with 17-significant-digit floats.
pub fn to_string<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let formatter = FixedDigits {
        inner: PrettyFormatter::with_indent(b"  "),
    };
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, formatter);
    value
        .serialize(&mut ser)
        .expect("serializing in-memory values cannot fail");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

/// Complex 3-vector split into real and imaginary parts.
#[derive(Debug, Clone, Copy, PartialEq, SerializeDerive, Deserialize)]
pub struct SplitVector {
    pub re: [f64; 3],
    pub im: [f64; 3],
}

impl From<&[Complex64; 3]> for SplitVector {
    fn from(v: &[Complex64; 3]) -> Self {
        SplitVector {
            re: v.map(|z| z.re),
            im: v.map(|z| z.im),
        }
    }
}

impl From<SplitVector> for [Complex64; 3] {
    fn from(v: SplitVector) -> Self {
        std::array::from_fn(|i| Complex64::new(v.re[i], v.im[i]))
    }
}

/// Complex 3×3 matrix split into real and imaginary parts, row-major.
#[derive(Debug, Clone, Copy, PartialEq, SerializeDerive, Deserialize)]
pub struct SplitMatrix {
    pub re: [[f64; 3]; 3],
    pub im: [[f64; 3]; 3],
}

impl From<&[[Complex64; 3]; 3]> for SplitMatrix {
    fn from(m: &[[Complex64; 3]; 3]) -> Self {
        SplitMatrix {
            re: m.map(|row| row.map(|z| z.re)),
            im: m.map(|row| row.map(|z| z.im)),
        }
    }
}

impl From<SplitMatrix> for [[Complex64; 3]; 3] {
    fn from(m: SplitMatrix) -> Self {
        std::array::from_fn(|r| std::array::from_fn(|c| Complex64::new(m.re[r][c], m.im[r][c])))
    }
}

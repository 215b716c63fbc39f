//! Value wrappers that fix the JSON representation of report fields.

use serde::{Serialize, Serializer};

use crate::entropy::{LogSum, Rational};

/// A rational written as the string `"p/q"`, including integers (`"2/1"`)
/// and zero (`"0/1"`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Exact(pub Rational);

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}/{}", self.0.numer(), self.0.denom()))
    }
}

impl From<Rational> for Exact {
    fn from(r: Rational) -> Self {
        Exact(r)
    }
}

/// A real number rounded to 12 significant digits on output.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Real(pub f64);

impl Real {
    pub fn rounded(&self) -> f64 {
        if self.0 == 0.0 || !self.0.is_finite() {
            return self.0;
        }
        format!("{:.11e}", self.0)
            .parse()
            .expect("formatted float parses")
    }
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v = self.rounded();
        if v.is_finite() {
            s.serialize_f64(v)
        } else {
            s.serialize_none()
        }
    }
}

impl From<f64> for Real {
    fn from(v: f64) -> Self {
        Real(v)
    }
}

/// An exact entropy value shown both symbolically and numerically.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactReal {
    pub exact: LogSum,
    pub value: Real,
}

impl From<LogSum> for ExactReal {
    fn from(exact: LogSum) -> Self {
        let value = Real(exact.to_f64());
        Self { exact, value }
    }
}

//! The extended real line `[-inf, +inf]`.
//!
//! Two monoidal sums live on the same ordered set and differ only on the
//! pair `{-inf, +inf}`:
//!
//! * the *cost* sum, where `-inf + inf = inf` (used by ρ- and δ-metrics),
//! * the *gain* sum, where `inf + -inf = -inf` (used by γ-antimetrics).
//!
//! Negation exchanges the two. Infinities are explicit variants so the
//! conventions are plain case analysis; IEEE arithmetic would give NaN.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Neg;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, Copy)]
pub enum ExtReal {
    NegInf,
    Finite(f64),
    PosInf,
}

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal::Finite(0.0);

    /// Maps `f64` infinities onto the infinite variants.
    ///
    /// Panics on NaN; use [`ExtReal::try_new`] for unchecked input.
    pub fn new(x: f64) -> Self {
        Self::try_new(x).expect("ExtReal cannot hold NaN")
    }

    pub fn try_new(x: f64) -> Option<Self> {
        if x.is_nan() {
            None
        } else if x == f64::INFINITY {
            Some(ExtReal::PosInf)
        } else if x == f64::NEG_INFINITY {
            Some(ExtReal::NegInf)
        } else {
            Some(ExtReal::Finite(x))
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(x) => Some(x),
            _ => None,
        }
    }

    /// Lossy view as `f64`, infinities included.
    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::NegInf => f64::NEG_INFINITY,
            ExtReal::Finite(x) => x,
            ExtReal::PosInf => f64::INFINITY,
        }
    }

    /// Sum with `-inf + inf = inf`.
    pub fn add_cost(self, other: ExtReal) -> ExtReal {
        use ExtReal::*;
        match (self, other) {
            (PosInf, _) | (_, PosInf) => PosInf,
            (NegInf, _) | (_, NegInf) => NegInf,
            (Finite(a), Finite(b)) => ExtReal::new(a + b),
        }
    }

    /// Sum with `inf + -inf = -inf`.
    pub fn add_gain(self, other: ExtReal) -> ExtReal {
        use ExtReal::*;
        match (self, other) {
            (NegInf, _) | (_, NegInf) => NegInf,
            (PosInf, _) | (_, PosInf) => PosInf,
            (Finite(a), Finite(b)) => ExtReal::new(a + b),
        }
    }

    pub fn negate(self) -> ExtReal {
        match self {
            ExtReal::NegInf => ExtReal::PosInf,
            ExtReal::Finite(x) => ExtReal::Finite(-x),
            ExtReal::PosInf => ExtReal::NegInf,
        }
    }

    /// `lambda * self` for a finite `lambda >= 0`, with `0 * (±inf) = 0`.
    pub fn scale_nonneg(self, lambda: f64) -> ExtReal {
        debug_assert!(lambda >= 0.0 && lambda.is_finite());
        match self {
            ExtReal::Finite(x) => ExtReal::new(lambda * x),
            _ if lambda == 0.0 => ExtReal::ZERO,
            inf => inf,
        }
    }

    fn rank(self) -> u8 {
        match self {
            ExtReal::NegInf => 0,
            ExtReal::Finite(_) => 1,
            ExtReal::PosInf => 2,
        }
    }
}

impl Default for ExtReal {
    fn default() -> Self {
        ExtReal::ZERO
    }
}

impl From<f64> for ExtReal {
    fn from(x: f64) -> Self {
        ExtReal::new(x)
    }
}

impl Neg for ExtReal {
    type Output = ExtReal;
    fn neg(self) -> ExtReal {
        self.negate()
    }
}

impl PartialEq for ExtReal {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for ExtReal {}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => {
                a.partial_cmp(b).expect("finite ExtReal is never NaN")
            }
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl PartialEq<f64> for ExtReal {
    fn eq(&self, other: &f64) -> bool {
        ExtReal::try_new(*other).is_some_and(|o| *self == o)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::NegInf => f.write_str("-inf"),
            ExtReal::Finite(x) => write!(f, "{x}"),
            ExtReal::PosInf => f.write_str("inf"),
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtReal::NegInf => s.serialize_str("-inf"),
            ExtReal::Finite(x) => s.serialize_f64(*x),
            ExtReal::PosInf => s.serialize_str("inf"),
        }
    }
}

struct ExtRealVisitor;

impl Visitor<'_> for ExtRealVisitor {
    type Value = ExtReal;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("a number or one of \"inf\", \"-inf\"")
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<ExtReal, E> {
        ExtReal::try_new(v).ok_or_else(|| E::custom("NaN is not an extended real"))
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<ExtReal, E> {
        Ok(ExtReal::Finite(v as f64))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<ExtReal, E> {
        Ok(ExtReal::Finite(v as f64))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<ExtReal, E> {
        match v {
            "inf" | "+inf" => Ok(ExtReal::PosInf),
            "-inf" => Ok(ExtReal::NegInf),
            other => Err(E::invalid_value(de::Unexpected::Str(other), &self)),
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<ExtReal, D::Error> {
        d.deserialize_any(ExtRealVisitor)
    }
}

//! Values in `(-inf, +inf]`.

use std::cmp::Ordering;
use std::fmt;

use crate::exact::{format_rational, to_f64, Rational};

#[derive(Debug, Clone, PartialEq)]
pub enum Extended<T> {
    Finite(T),
    PosInf,
}

pub type ExtendedReal = Extended<f64>;
pub type ExtendedRational = Extended<Rational>;

impl<T> Extended<T> {
    pub fn is_finite(&self) -> bool {
        matches!(self, Extended::Finite(_))
    }

    pub fn finite(&self) -> Option<&T> {
        match self {
            Extended::Finite(x) => Some(x),
            Extended::PosInf => None,
        }
    }
}

/// `+inf` serializes as the string `"+inf"`; JSON has no infinity.
impl<T: serde::Serialize> serde::Serialize for Extended<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Extended::Finite(x) => x.serialize(s),
            Extended::PosInf => s.serialize_str("+inf"),
        }
    }
}

impl ExtendedReal {
    /// `+inf` maps to `f64::INFINITY`.
    pub fn to_f64(&self) -> f64 {
        match self {
            Extended::Finite(x) => *x,
            Extended::PosInf => f64::INFINITY,
        }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == f64::INFINITY {
            Extended::PosInf
        } else {
            Extended::Finite(x)
        }
    }
}

impl ExtendedRational {
    pub fn to_real(&self) -> ExtendedReal {
        match self {
            Extended::Finite(x) => Extended::Finite(to_f64(x)),
            Extended::PosInf => Extended::PosInf,
        }
    }
}

impl<T: std::ops::Add<Output = T>> std::ops::Add for Extended<T> {
    type Output = Extended<T>;
    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (Extended::Finite(a), Extended::Finite(b)) => Extended::Finite(a + b),
            _ => Extended::PosInf,
        }
    }
}

impl<T: PartialOrd> PartialOrd for Extended<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Extended::Finite(a), Extended::Finite(b)) => a.partial_cmp(b),
            (Extended::Finite(_), Extended::PosInf) => Some(Ordering::Less),
            (Extended::PosInf, Extended::Finite(_)) => Some(Ordering::Greater),
            (Extended::PosInf, Extended::PosInf) => Some(Ordering::Equal),
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(x) => write!(f, "{x}"),
            Extended::PosInf => write!(f, "+inf"),
        }
    }
}

impl fmt::Display for ExtendedRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(x) => write!(f, "{}", format_rational(x)),
            Extended::PosInf => write!(f, "+inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinity_absorbs_addition() {
        let a: ExtendedReal = Extended::Finite(1.0);
        assert_eq!(a.clone() + Extended::PosInf, Extended::PosInf);
        assert_eq!(a.clone() + Extended::Finite(2.0), Extended::Finite(3.0));
        assert!(a < Extended::PosInf);
        assert_eq!(ExtendedReal::from_f64(f64::INFINITY), Extended::PosInf);
    }
}

//! Intervals with rational endpoints and open/closed flags.

use std::fmt;

use num_traits::Zero;

use crate::exact::{format_rational, to_f64, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Bound {
    Finite { value: Rational, closed: bool },
    Infinite,
}

impl Bound {
    pub fn closed(value: Rational) -> Self {
        Bound::Finite { value, closed: true }
    }

    pub fn open(value: Rational) -> Self {
        Bound::Finite {
            value,
            closed: false,
        }
    }

    pub fn value(&self) -> Option<&Rational> {
        match self {
            Bound::Finite { value, .. } => Some(value),
            Bound::Infinite => None,
        }
    }

    pub fn is_closed(&self) -> bool {
        matches!(self, Bound::Finite { closed: true, .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: Bound,
    pub hi: Bound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Lower,
    Upper,
}

impl Interval {
    pub fn real_line() -> Self {
        Interval {
            lo: Bound::Infinite,
            hi: Bound::Infinite,
        }
    }

    pub fn point(a: Rational) -> Self {
        Interval {
            lo: Bound::closed(a.clone()),
            hi: Bound::closed(a),
        }
    }

    pub fn bound(&self, side: Side) -> &Bound {
        match side {
            Side::Lower => &self.lo,
            Side::Upper => &self.hi,
        }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let lo_ok = match &self.lo {
            Bound::Infinite => true,
            Bound::Finite { value, closed } => {
                if *closed {
                    x >= value
                } else {
                    x > value
                }
            }
        };
        let hi_ok = match &self.hi {
            Bound::Infinite => true,
            Bound::Finite { value, closed } => {
                if *closed {
                    x <= value
                } else {
                    x < value
                }
            }
        };
        lo_ok && hi_ok
    }

    /// Floating-point membership with the same open/closed semantics.
    pub fn contains_f64(&self, x: f64) -> bool {
        let lo_ok = match &self.lo {
            Bound::Infinite => true,
            Bound::Finite { value, closed } => {
                let v = to_f64(value);
                if *closed {
                    x >= v
                } else {
                    x > v
                }
            }
        };
        let hi_ok = match &self.hi {
            Bound::Infinite => true,
            Bound::Finite { value, closed } => {
                let v = to_f64(value);
                if *closed {
                    x <= v
                } else {
                    x < v
                }
            }
        };
        lo_ok && hi_ok
    }

    pub fn has_interior(&self) -> bool {
        match (&self.lo, &self.hi) {
            (Bound::Finite { value: a, .. }, Bound::Finite { value: b, .. }) => a < b,
            _ => true,
        }
    }

    pub fn contains_zero_in_interior(&self) -> bool {
        let z = Rational::zero();
        let lo_ok = self.lo.value().is_none_or(|v| *v < z);
        let hi_ok = self.hi.value().is_none_or(|v| *v > z);
        lo_ok && hi_ok
    }

    /// Intersection; where two bounds coincide the result is closed only if
    /// both are closed.
    pub fn intersect(&self, other: &Interval) -> Interval {
        let lo = match (&self.lo, &other.lo) {
            (Bound::Infinite, b) | (b, Bound::Infinite) => b.clone(),
            (
                Bound::Finite { value: a, closed: ca },
                Bound::Finite { value: b, closed: cb },
            ) => {
                if a > b {
                    self.lo.clone()
                } else if b > a {
                    other.lo.clone()
                } else {
                    Bound::Finite {
                        value: a.clone(),
                        closed: *ca && *cb,
                    }
                }
            }
        };
        let hi = match (&self.hi, &other.hi) {
            (Bound::Infinite, b) | (b, Bound::Infinite) => b.clone(),
            (
                Bound::Finite { value: a, closed: ca },
                Bound::Finite { value: b, closed: cb },
            ) => {
                if a < b {
                    self.hi.clone()
                } else if b < a {
                    other.hi.clone()
                } else {
                    Bound::Finite {
                        value: a.clone(),
                        closed: *ca && *cb,
                    }
                }
            }
        };
        Interval { lo, hi }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let (Bound::Finite { value: a, .. }, Bound::Finite { value: b, .. }) =
            (&self.lo, &self.hi)
        {
            if a == b {
                return write!(f, "{{{}}}", short(a));
            }
        }
        match &self.lo {
            Bound::Infinite => write!(f, "(−∞")?,
            Bound::Finite { value, closed } => {
                write!(f, "{}{}", if *closed { "[" } else { "(" }, short(value))?
            }
        }
        write!(f, ",")?;
        match &self.hi {
            Bound::Infinite => write!(f, "∞)"),
            Bound::Finite { value, closed } => {
                write!(f, "{}{}", short(value), if *closed { "]" } else { ")" })
            }
        }
    }
}

/// Integers print without a denominator.
pub fn short(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format_rational(r)
    }
}

use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg};

/// A real number extended with both infinities.
///
/// `+inf + -inf` never arises in this crate; it panics in debug builds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    NegInfinity,
    Finite(f64),
    PosInfinity,
}

impl ExtendedReal {
    pub const ZERO: ExtendedReal = ExtendedReal::Finite(0.0);

    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    pub fn is_pos_infinite(self) -> bool {
        matches!(self, ExtendedReal::PosInfinity)
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(v) => Some(v),
            _ => None,
        }
    }

    /// Maps onto `f64`, with infinities as IEEE infinities.
    pub fn to_f64(self) -> f64 {
        match self {
            ExtendedReal::NegInfinity => f64::NEG_INFINITY,
            ExtendedReal::Finite(v) => v,
            ExtendedReal::PosInfinity => f64::INFINITY,
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }
}

impl From<f64> for ExtendedReal {
    fn from(v: f64) -> Self {
        debug_assert!(!v.is_nan(), "NaN has no extended-real value");
        if v == f64::INFINITY {
            ExtendedReal::PosInfinity
        } else if v == f64::NEG_INFINITY {
            ExtendedReal::NegInfinity
        } else {
            ExtendedReal::Finite(v)
        }
    }
}

impl PartialOrd for ExtendedReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.to_f64().partial_cmp(&other.to_f64())
    }
}

impl Add for ExtendedReal {
    type Output = ExtendedReal;

    fn add(self, rhs: Self) -> Self {
        use ExtendedReal::*;
        match (self, rhs) {
            (Finite(a), Finite(b)) => Finite(a + b),
            (PosInfinity, NegInfinity) | (NegInfinity, PosInfinity) => {
                debug_assert!(false, "indeterminate +inf + -inf");
                Finite(0.0)
            }
            (PosInfinity, _) | (_, PosInfinity) => PosInfinity,
            _ => NegInfinity,
        }
    }
}

impl Neg for ExtendedReal {
    type Output = ExtendedReal;

    fn neg(self) -> Self {
        match self {
            ExtendedReal::NegInfinity => ExtendedReal::PosInfinity,
            ExtendedReal::Finite(v) => ExtendedReal::Finite(-v),
            ExtendedReal::PosInfinity => ExtendedReal::NegInfinity,
        }
    }
}

/// Scaling by a nonnegative weight, with `0 * inf = 0`.
impl Mul<f64> for ExtendedReal {
    type Output = ExtendedReal;

    fn mul(self, w: f64) -> Self {
        debug_assert!(w >= 0.0);
        if w == 0.0 {
            return ExtendedReal::ZERO;
        }
        match self {
            ExtendedReal::Finite(v) => ExtendedReal::Finite(v * w),
            inf => inf,
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::NegInfinity => f.write_str("-inf"),
            ExtendedReal::Finite(v) => write!(f, "{v}"),
            ExtendedReal::PosInfinity => f.write_str("+inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_times_infinity_is_zero() {
        assert_eq!(ExtendedReal::PosInfinity * 0.0, ExtendedReal::ZERO);
        assert_eq!(ExtendedReal::PosInfinity * 0.5, ExtendedReal::PosInfinity);
    }

    #[test]
    fn ordering_and_sum() {
        let a = ExtendedReal::Finite(1.0);
        assert!(a < ExtendedReal::PosInfinity);
        assert!(ExtendedReal::NegInfinity < a);
        assert_eq!(a + ExtendedReal::PosInfinity, ExtendedReal::PosInfinity);
        assert_eq!(-ExtendedReal::PosInfinity, ExtendedReal::NegInfinity);
        assert_eq!(ExtendedReal::from(f64::INFINITY), ExtendedReal::PosInfinity);
    }
}

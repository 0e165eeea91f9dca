//! Sign + log-magnitude scalars.
//!
//! Gamma-scale quantities such as `Γ(mn + 2q)` overflow `f64` long before the
//! dimensions of interest are exhausted, while every quantity we ultimately
//! report is a benign ratio. [`LogScaled`] keeps the sign and the natural log
//! of the magnitude so products and ratios stay exact-ish at any scale, and
//! sums rescale by the dominant magnitude.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// A real number stored as `sign * exp(log_mag)`.
///
/// `sign == 0` represents exactly zero regardless of `log_mag`.
#[derive(Debug, Clone, Copy)]
pub struct LogScaled {
    sign: i8,
    log_mag: f64,
}

impl LogScaled {
    pub const ZERO: Self = LogScaled {
        sign: 0,
        log_mag: f64::NEG_INFINITY,
    };

    pub const ONE: Self = LogScaled {
        sign: 1,
        log_mag: 0.0,
    };

    /// Builds from an explicit sign and log-magnitude.
    pub fn new(sign: i8, log_mag: f64) -> Self {
        assert!(matches!(sign, -1..=1), "sign must be -1, 0 or +1");
        if sign == 0 {
            Self::ZERO
        } else {
            LogScaled { sign, log_mag }
        }
    }

    /// A positive value given by its natural log.
    pub fn from_ln(log_mag: f64) -> Self {
        LogScaled { sign: 1, log_mag }
    }

    pub fn from_f64(value: f64) -> Self {
        if value == 0.0 {
            Self::ZERO
        } else {
            LogScaled {
                sign: if value > 0.0 { 1 } else { -1 },
                log_mag: value.abs().ln(),
            }
        }
    }

    /// Converts back to `f64`; overflows to `±inf` and underflows to `±0`.
    pub fn to_f64(self) -> f64 {
        f64::from(self.sign) * self.log_mag.exp()
    }

    pub fn sign(self) -> i8 {
        self.sign
    }

    /// Natural log of the magnitude; `-inf` for zero.
    pub fn log_mag(self) -> f64 {
        self.log_mag
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    pub fn abs(self) -> Self {
        LogScaled {
            sign: self.sign.abs(),
            log_mag: self.log_mag,
        }
    }

    pub fn square(self) -> Self {
        LogScaled {
            sign: self.sign * self.sign,
            log_mag: 2.0 * self.log_mag,
        }
    }

    pub fn recip(self) -> Self {
        assert!(self.sign != 0, "reciprocal of zero");
        LogScaled {
            sign: self.sign,
            log_mag: -self.log_mag,
        }
    }

    /// Multiplies by a plain float.
    pub fn scale(self, factor: f64) -> Self {
        self * LogScaled::from_f64(factor)
    }
}

impl Mul for LogScaled {
    type Output = LogScaled;
    fn mul(self, rhs: Self) -> Self {
        let sign = self.sign * rhs.sign;
        if sign == 0 {
            Self::ZERO
        } else {
            LogScaled {
                sign,
                log_mag: self.log_mag + rhs.log_mag,
            }
        }
    }
}

impl Div for LogScaled {
    type Output = LogScaled;
    fn div(self, rhs: Self) -> Self {
        assert!(rhs.sign != 0, "division by zero");
        let sign = self.sign * rhs.sign;
        if sign == 0 {
            Self::ZERO
        } else {
            LogScaled {
                sign,
                log_mag: self.log_mag - rhs.log_mag,
            }
        }
    }
}

impl Neg for LogScaled {
    type Output = LogScaled;
    fn neg(self) -> Self {
        LogScaled {
            sign: -self.sign,
            log_mag: self.log_mag,
        }
    }
}

impl Add for LogScaled {
    type Output = LogScaled;
    /// Addition rescales both operands by the larger magnitude, so the
    /// relative error is one rounding of the dominant term.
    fn add(self, rhs: Self) -> Self {
        if self.sign == 0 {
            return rhs;
        }
        if rhs.sign == 0 {
            return self;
        }
        let (big, small) = if self.log_mag >= rhs.log_mag {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let scaled =
            f64::from(big.sign) + f64::from(small.sign) * (small.log_mag - big.log_mag).exp();
        if scaled == 0.0 {
            Self::ZERO
        } else {
            LogScaled {
                sign: if scaled > 0.0 { 1 } else { -1 },
                log_mag: big.log_mag + scaled.abs().ln(),
            }
        }
    }
}

impl Sub for LogScaled {
    type Output = LogScaled;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl std::iter::Sum for LogScaled {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, Add::add)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_semantics() {
        let z = LogScaled::new(0, 12345.0);
        assert!(z.is_zero());
        assert_eq!(z.to_f64(), 0.0);
        assert!((z * LogScaled::from_f64(3.0)).is_zero());
        assert_eq!((z + LogScaled::from_f64(-2.5)).to_f64(), -2.5);
    }

    #[test]
    fn huge_magnitudes_survive_ratios() {
        // Γ-scale numbers far beyond f64 range still divide cleanly.
        let a = LogScaled::from_ln(30_000.0);
        let b = LogScaled::from_ln(29_999.0);
        let r = (a / b).to_f64();
        assert!((r - 1.0f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn cancellation_to_exact_zero() {
        let a = LogScaled::from_f64(7.25);
        assert!((a - a).is_zero());
    }

    proptest! {
        #[test]
        fn round_trip_is_faithful(v in -1e300f64..1e300) {
            let back = LogScaled::from_f64(v).to_f64();
            // exp(ln|v|) amplifies the log rounding by |ln v|
            let bound = 2.0 * f64::EPSILON * v.abs() * (1.0 + v.abs().ln().abs());
            prop_assert!((back - v).abs() <= bound, "{back} vs {v}");
        }

        #[test]
        fn add_matches_f64(a in -1e12f64..1e12, b in -1e12f64..1e12) {
            let s = (LogScaled::from_f64(a) + LogScaled::from_f64(b)).to_f64();
            let expect = a + b;
            prop_assert!(
                (s - expect).abs() <= 1e-13 * (a.abs() + b.abs()).max(1.0),
                "{s} vs {expect}"
            );
        }

        #[test]
        fn mul_matches_f64(a in -1e100f64..1e100, b in -1e100f64..1e100) {
            let p = (LogScaled::from_f64(a) * LogScaled::from_f64(b)).to_f64();
            let expect = a * b;
            prop_assert!((p - expect).abs() <= 1e-12 * expect.abs().max(f64::MIN_POSITIVE));
        }
    }
}

//! Exact rational backend.
//!
//! When the entropy order `q` is a positive integer every term of the moment
//! formulas is a ratio of integers, so the whole chain can be evaluated
//! without rounding. The scalar type is [`num_rational::BigRational`], which
//! already maintains the invariants we need (lowest terms, positive
//! denominator); this module adds the gamma-family helpers on top.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact scalar: arbitrary-precision rational, always in lowest terms with a
/// positive denominator.
pub type RationalScalar = BigRational;

pub fn rat_int(v: i64) -> RationalScalar {
    BigRational::from_integer(BigInt::from(v))
}

pub fn rat_ratio(num: i64, den: i64) -> RationalScalar {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// `k!` as an exact integer rational.
pub fn rat_factorial(k: u32) -> RationalScalar {
    let mut f = BigInt::one();
    for i in 2..=k {
        f *= BigInt::from(i);
    }
    BigRational::from_integer(f)
}

/// Rising factorial `(a)_k` in exact arithmetic.
pub fn rat_pochhammer(a: &RationalScalar, k: u32) -> RationalScalar {
    let mut p = BigRational::one();
    for i in 0..k {
        p *= a + rat_int(i64::from(i));
    }
    p
}

/// Generalized binomial `C(a, k)` in exact arithmetic.
pub fn rat_gen_binomial(a: &RationalScalar, k: u32) -> RationalScalar {
    let mut num = BigRational::one();
    for i in 0..k {
        num *= a - rat_int(i64::from(i));
    }
    num / rat_factorial(k)
}

/// `Γ(a + k) / Γ(a)` for integer offset `k >= 0`; exact shifted product.
pub fn rat_gamma_ratio(a: i64, k: u32) -> RationalScalar {
    let base = rat_int(a);
    rat_pochhammer(&base, k)
}

/// Lossy conversion for cross-checking against the float path.
pub fn to_f64(r: &RationalScalar) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Fall back through a scaled representation when numerator or
        // denominator individually exceed f64 range.
        let num_bits = r.numer().bits() as i64;
        let den_bits = r.denom().bits() as i64;
        let shift = (num_bits.max(den_bits) - 900).max(0) as u64;
        let num = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
        let den = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
        num / den
    })
}

/// Renders as `p/q` (or just `p` for integers), the exact-mode wire format.
pub fn render(r: &RationalScalar) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Terminating `₃F₂` at unit argument in exact rational arithmetic.
///
/// Same termination semantics as the float path: `a1` must be a non-positive
/// integer, an early zero upper factor ends the series, and a vanishing lower
/// factor while terms are live is an error.
pub fn hyp3f2_terminating_rational(
    a1: &RationalScalar,
    a2: &RationalScalar,
    a3: &RationalScalar,
    b1: &RationalScalar,
    b2: &RationalScalar,
) -> Result<RationalScalar> {
    if !a1.is_integer() || a1.is_positive() {
        return Err(Error::NotTerminating { a1: to_f64(a1) });
    }
    let k_max = (-a1)
        .to_integer()
        .to_u32()
        .ok_or(Error::NotTerminating { a1: to_f64(a1) })?;

    let mut term = BigRational::one();
    let mut sum = BigRational::zero();
    for k in 0..=k_max {
        sum += &term;
        if k == k_max {
            break;
        }
        let kf = rat_int(i64::from(k));
        let numer = (a1 + &kf) * (a2 + &kf) * (a3 + &kf);
        if numer.is_zero() {
            break;
        }
        for b in [b1, b2] {
            if (b + &kf).is_zero() {
                return Err(Error::DenominatorPole { b: to_f64(b), k });
            }
        }
        let denom = (b1 + &kf) * (b2 + &kf) * (&kf + BigRational::one());
        term *= numer / denom;
    }
    Ok(sum)
}

//! Exact rational evaluation for positive integer `q`.
//!
//! With integer `q >= 2` every ingredient of the moment chain is a ratio of
//! integers: the gamma ratios are shifted factorials, the `₃F₂` terms are
//! rational, and the Schrödinger pair integrals are integers divided by
//! factorials. The resulting `E_f[T]`, `E_f[T²]`, and `V_f[T]` are exact
//! rationals, used both as a fast path and as the validation reference for
//! the float path.

use crate::error::{Error, Result};
use crate::laguerre::{self, Dims};
use crate::specfun::rational::{
    hyp3f2_terminating_rational, rat_factorial, rat_gamma_ratio, rat_int, RationalScalar,
};
use num_traits::One;

/// Largest `m n + 2q` the exact general path accepts; beyond this the
/// factorials grow past any sensible use and the float path is the tool.
pub const EXACT_SIZE_LIMIT: u64 = 200;

/// Exact fixed-trace Tsallis moments.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactMoments {
    pub mean: RationalScalar,
    pub second_moment: RationalScalar,
    pub variance: RationalScalar,
}

/// Returns `Some(q as integer)` when the exact path applies: `q` a positive
/// integer `>= 2`, and either `q = 2` (closed form, any dims) or
/// `m n + 2q <= 200`.
pub fn availability(dims: Dims, q: f64) -> Option<u32> {
    if q < 2.0 || q.fract() != 0.0 || q > 1e6 {
        return None;
    }
    let qi = q as u32;
    if qi == 2 || dims.mn() + 2 * u64::from(qi) <= EXACT_SIZE_LIMIT {
        Some(qi)
    } else {
        None
    }
}

/// Exact `E_g[L] = m Γ(n+q)/(n-1)! ₃F₂(1-m, -q, 1-q; 1-n-q, 2; 1)`.
pub fn induced_mean_exact(dims: Dims, q: u32) -> Result<RationalScalar> {
    let m = i64::from(dims.m());
    let n = i64::from(dims.n());
    let qi = i64::from(q);
    let series = hyp3f2_terminating_rational(
        &rat_int(1 - m),
        &rat_int(-qi),
        &rat_int(1 - qi),
        &rat_int(1 - n - qi),
        &rat_int(2),
    )?;
    Ok(rat_int(m) * rat_gamma_ratio(n, q) * series)
}

/// Exact `E_g[L²] = (E_g[L])² + I₁ - I₂`.
pub fn induced_second_exact(dims: Dims, q: u32) -> Result<RationalScalar> {
    let m = i64::from(dims.m());
    let n = i64::from(dims.n());
    let qi = i64::from(q);
    let alpha = i64::from(dims.alpha());

    let mean = induced_mean_exact(dims, q)?;

    let i1_series = hyp3f2_terminating_rational(
        &rat_int(1 - m),
        &rat_int(-2 * qi),
        &rat_int(1 - 2 * qi),
        &rat_int(1 - n - 2 * qi),
        &rat_int(2),
    )?;
    let i1 = rat_int(m) * rat_gamma_ratio(n, 2 * q) * i1_series;

    let mut i2 = rat_int(0);
    for j in 0..dims.m() {
        for i in 0..=j {
            let a_ij = laguerre::schrodinger_integral_rational(i, j, alpha, alpha, alpha + qi)?;
            let weight = rat_factorial(i) * rat_factorial(j)
                / (rat_factorial(dims.alpha() + i) * rat_factorial(dims.alpha() + j));
            let mult = if i == j { rat_int(1) } else { rat_int(2) };
            i2 += mult * weight * &a_ij * &a_ij;
        }
    }

    Ok(&mean * &mean + i1 - i2)
}

/// Exact fixed-trace moments through the conversion relation.
pub fn tsallis_exact(dims: Dims, q: u32) -> Result<ExactMoments> {
    if q < 2 {
        return Err(Error::ExactUnavailable {
            q: f64::from(q),
            mn: dims.mn(),
        });
    }
    if availability(dims, f64::from(q)).is_none() {
        return Err(Error::ExactUnavailable {
            q: f64::from(q),
            mn: dims.mn(),
        });
    }
    if q == 2 {
        return Ok(quadratic_exact(dims));
    }
    let mn = i64::try_from(dims.mn()).expect("mn <= 200");
    let e_l = induced_mean_exact(dims, q)?;
    let e_l2 = induced_second_exact(dims, q)?;
    // Γ(mn)/Γ(mn + q) = 1 / (mn)_q
    let g1 = RationalScalar::one() / rat_gamma_ratio(mn, q);
    let g2 = RationalScalar::one() / rat_gamma_ratio(mn, 2 * q);
    let qm1 = rat_int(i64::from(q) - 1);
    let mean = (RationalScalar::one() - g1.clone() * &e_l) / &qm1;
    let second = (RationalScalar::one() - rat_int(2) * g1 * &e_l + g2 * &e_l2) / (&qm1 * &qm1);
    let variance = &second - &mean * &mean;
    Ok(ExactMoments {
        mean,
        second_moment: second,
        variance,
    })
}

/// Quadratic entropy (`q = 2`) closed forms:
/// `E_f[T] = (m-1)(n-1)/(mn+1)`,
/// `E_f[T²] = (m-1)(n-1)(m²n² - mn² - m²n + 5mn - 4n - 4m + 8) / ((mn+1)(mn+2)(mn+3))`,
/// `V_f[T] = 2(m² - 1)(n² - 1) / ((mn+1)²(mn+2)(mn+3))`.
pub fn quadratic_exact(dims: Dims) -> ExactMoments {
    let m = rat_int(i64::from(dims.m()));
    let n = rat_int(i64::from(dims.n()));
    let one = RationalScalar::one();
    let mn = &m * &n;

    let mean = (&m - &one) * (&n - &one) / (&mn + &one);

    let poly = &mn * &mn - &m * &n * &n - &m * &m * &n + rat_int(5) * &mn
        - rat_int(4) * &n
        - rat_int(4) * &m
        + rat_int(8);
    let second =
        (&m - &one) * (&n - &one) * poly / ((&mn + &one) * (&mn + rat_int(2)) * (&mn + rat_int(3)));

    let variance = rat_int(2) * (&m * &m - &one) * (&n * &n - &one)
        / ((&mn + &one) * (&mn + &one) * (&mn + rat_int(2)) * (&mn + rat_int(3)));

    ExactMoments {
        mean,
        second_moment: second,
        variance,
    }
}

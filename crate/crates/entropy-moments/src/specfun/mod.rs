//! Gamma-family and terminating-hypergeometric primitives.
//!
//! Everything here is a pure function, callable concurrently. The design
//! constraints that matter downstream:
//!
//! * [`rgamma`] is total and returns an exact `0.0` at non-positive integers,
//!   so formula terms containing `1/Γ(q - k + 1)` vanish structurally when
//!   they must.
//! * [`pochhammer`] and [`gen_binomial`] are running products, never gamma
//!   differences, so signs and exact zeros are structural.
//! * [`hyp3f2_terminating`] sums with compensated (Kahan) accumulation,
//!   reports a cancellation metric, and falls back to exact rational
//!   summation when the metric indicates the float result is untrustworthy.

mod log_scaled;
pub mod rational;

pub use log_scaled::LogScaled;
pub use rational::RationalScalar;

use crate::error::{Error, Result};
use num_rational::BigRational;

/// Absolute tolerance for snapping a float to an integer. The closed forms
/// require terms with `Γ` at non-positive integers to vanish exactly.
pub const INT_DETECT_TOL: f64 = 1e-12;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;

/// `B_{2k} / (2k (2k - 1))`, the Stirling-series coefficients of `ln Γ`.
const LN_GAMMA_TAIL: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// `B_{2k} / (2k)`, the asymptotic-series coefficients of `ψ₀`.
const DIGAMMA_TAIL: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32_760.0,
    1.0 / 12.0,
];

/// `B_{2k}`, the asymptotic-series coefficients of `ψ₁`.
const TRIGAMMA_TAIL: [f64; 7] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
];

/// Arguments below this are lifted by the recurrence before the asymptotic
/// series is applied.
const ASYMPTOTIC_CUTOFF: f64 = 10.0;

/// Natural log of the gamma function for `x > 0`.
///
/// Stirling's series after lifting small arguments with the recurrence
/// `Γ(x + 1) = x Γ(x)`; the shift is accumulated as a product so only a
/// single `ln` is taken.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 {
        return Err(Error::Domain {
            func: "ln_gamma",
            value: x,
            constraint: "x > 0",
        });
    }
    if x == 1.0 || x == 2.0 {
        return Ok(0.0);
    }
    let mut shift = 1.0;
    let mut y = x;
    while y < ASYMPTOTIC_CUTOFF {
        shift *= y;
        y += 1.0;
    }
    let inv = 1.0 / y;
    let inv2 = inv * inv;
    let mut tail = 0.0;
    for &c in LN_GAMMA_TAIL.iter().rev() {
        tail = tail * inv2 + c;
    }
    tail *= inv;
    Ok((y - 0.5) * y.ln() - y + LN_SQRT_2PI + tail - shift.ln())
}

/// Reciprocal gamma `1/Γ(x)`, total over the reals.
///
/// Exactly `0.0` at non-positive integers (within [`INT_DETECT_TOL`]);
/// computed by reflection for negative non-integers.
pub fn rgamma(x: f64) -> f64 {
    if x > 0.0 {
        // exp(-ln Γ) underflows gracefully to 0 for huge x
        return (-ln_gamma(x).expect("x > 0")).exp();
    }
    let nearest = x.round();
    if (x - nearest).abs() <= INT_DETECT_TOL {
        return 0.0;
    }
    // reflection: 1/Γ(x) = Γ(1 - x) sin(πx) / π
    let s = sin_pi(x);
    let ln_ref = ln_gamma(1.0 - x).expect("1 - x > 1") + s.abs().ln() - std::f64::consts::PI.ln();
    s.signum() * ln_ref.exp()
}

/// `sin(πx)` computed through the argument reduced to `[-1/2, 1/2]`, which
/// stays accurate for large `|x|` where `sin(π * x)` would not.
fn sin_pi(x: f64) -> f64 {
    let nearest = x.round();
    let r = x - nearest;
    let s = (std::f64::consts::PI * r).sin();
    if (nearest as i64) % 2 == 0 {
        s
    } else {
        -s
    }
}

/// Digamma `ψ₀(x)` for `x > 0`.
pub fn digamma(x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 {
        return Err(Error::Domain {
            func: "digamma",
            value: x,
            constraint: "x > 0",
        });
    }
    let mut acc = 0.0;
    let mut y = x;
    while y < ASYMPTOTIC_CUTOFF {
        acc -= 1.0 / y;
        y += 1.0;
    }
    let inv = 1.0 / y;
    let inv2 = inv * inv;
    let mut tail = 0.0;
    for &c in DIGAMMA_TAIL.iter().rev() {
        tail = tail * inv2 + c;
    }
    Ok(acc + y.ln() - 0.5 * inv - tail * inv2)
}

/// Trigamma `ψ₁(x)` for `x > 0`.
pub fn trigamma(x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 {
        return Err(Error::Domain {
            func: "trigamma",
            value: x,
            constraint: "x > 0",
        });
    }
    let mut acc = 0.0;
    let mut y = x;
    while y < ASYMPTOTIC_CUTOFF {
        acc += 1.0 / (y * y);
        y += 1.0;
    }
    let inv = 1.0 / y;
    let inv2 = inv * inv;
    let mut tail = 0.0;
    for &c in TRIGAMMA_TAIL.iter().rev() {
        tail = tail * inv2 + c;
    }
    Ok(acc + inv + 0.5 * inv2 + tail * inv2 * inv)
}

/// Rising factorial `(a)_k = a (a+1) ... (a+k-1)`.
///
/// The empty product is 1; a zero factor short-circuits to an exact 0.
pub fn pochhammer(a: f64, k: u32) -> f64 {
    let mut p = 1.0;
    for i in 0..k {
        let factor = a + f64::from(i);
        if factor == 0.0 {
            return 0.0;
        }
        p *= factor;
    }
    p
}

/// Generalized binomial `C(a, k) = a (a-1) ... (a-k+1) / k!` for real `a`.
///
/// Computed as a running product over the falling factorial followed by one
/// division by `k!`, so integer inputs give exact integer results and a zero
/// factor gives an exact 0 (nonnegative integer `a < k`).
pub fn gen_binomial(a: f64, k: u32) -> f64 {
    let mut num = 1.0;
    for i in 0..k {
        let factor = a - f64::from(i);
        if factor == 0.0 {
            return 0.0;
        }
        num *= factor;
    }
    num / factorial(k)
}

/// `k!` as a float; exact for `k <= 22`, saturating to `inf` past 170.
pub fn factorial(k: u32) -> f64 {
    let mut f = 1.0f64;
    for i in 2..=k {
        f *= f64::from(i);
    }
    f
}

/// Result of a terminating hypergeometric sum.
#[derive(Debug, Clone, Copy)]
pub struct HypSum {
    pub value: f64,
    /// `log10(max |partial sum| / |result|)`: how many digits the alternating
    /// sum destroyed. `inf` when the result is exactly zero.
    pub cancellation_log10: f64,
    /// The float sum looked untrustworthy and the value was recomputed with
    /// exact rational arithmetic.
    pub used_exact_fallback: bool,
}

/// Cancellation (in decimal digits) beyond which the float sum is replaced by
/// the exact rational fallback.
pub const CANCELLATION_FALLBACK_DIGITS: f64 = 10.0;

/// Terminating `₃F₂(a1, a2, a3; b1, b2; 1)` with `a1` a non-positive integer.
///
/// Summed via the term-ratio recurrence
/// `t_{k+1} = t_k (a1+k)(a2+k)(a3+k) / ((b1+k)(b2+k)(k+1))`
/// with compensated accumulation. If another upper parameter terminates the
/// series first the remaining terms are zero and the loop stops; a vanishing
/// lower-parameter factor while terms are still live is an error.
pub fn hyp3f2_terminating(a1: f64, a2: f64, a3: f64, b1: f64, b2: f64) -> Result<HypSum> {
    let rounded = a1.round();
    if (a1 - rounded).abs() > INT_DETECT_TOL || rounded > 0.0 {
        return Err(Error::NotTerminating { a1 });
    }
    let k_max = (-rounded) as u32;

    let mut term = 1.0f64;
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut max_abs = 0.0f64;
    for k in 0..=k_max {
        // Kahan update
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        max_abs = max_abs.max(sum.abs());

        if k == k_max {
            break;
        }
        let kf = f64::from(k);
        let numer = (a1 + kf) * (a2 + kf) * (a3 + kf);
        if numer == 0.0 {
            break; // an upper parameter terminated the series early
        }
        for &b in &[b1, b2] {
            if b + kf == 0.0 {
                return Err(Error::DenominatorPole { b, k });
            }
        }
        term *= numer / ((b1 + kf) * (b2 + kf) * (kf + 1.0));
    }

    let cancellation_log10 = if sum == 0.0 {
        f64::INFINITY
    } else {
        (max_abs / sum.abs()).log10().max(0.0)
    };

    if cancellation_log10 > CANCELLATION_FALLBACK_DIGITS {
        // Every f64 is an exact binary rational, so the same sum can always
        // be replayed exactly.
        let exact = rational::hyp3f2_terminating_rational(
            &BigRational::from_float(a1).expect("finite"),
            &BigRational::from_float(a2).expect("finite"),
            &BigRational::from_float(a3).expect("finite"),
            &BigRational::from_float(b1).expect("finite"),
            &BigRational::from_float(b2).expect("finite"),
        )?;
        return Ok(HypSum {
            value: rational::to_f64(&exact),
            cancellation_log10,
            used_exact_fallback: true,
        });
    }

    Ok(HypSum {
        value: sum,
        cancellation_log10,
        used_exact_fallback: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel_err(got: f64, want: f64) -> f64 {
        (got - want).abs() / want.abs().max(f64::MIN_POSITIVE)
    }

    /// Independent oracle for Γ(1/2): composite Simpson on 2∫₀^∞ e^{-t²} dt
    /// after the substitution x = t² in ∫ x^{-1/2} e^{-x} dx. Kahan-summed so
    /// the accumulation over 2e6 panels does not swamp the truncation error.
    fn gamma_half_by_quadrature() -> f64 {
        let (a, b, steps) = (0.0f64, 26.0f64, 2_000_000usize);
        let h = (b - a) / steps as f64;
        let f = |t: f64| 2.0 * (-t * t).exp();
        let mut s = f(a) + f(b);
        let mut comp = 0.0;
        for i in 1..steps {
            let x = a + h * i as f64;
            let term = if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
            let y = term - comp;
            let t = s + y;
            comp = (t - s) - y;
            s = t;
        }
        s * h / 3.0
    }

    #[test]
    fn ln_gamma_spot_values() {
        assert_eq!(ln_gamma(1.0).unwrap(), 0.0);
        assert_eq!(ln_gamma(2.0).unwrap(), 0.0);
        assert!(rel_err(ln_gamma(5.0).unwrap(), 24.0f64.ln()) < 1e-15);
        // frozen from the quadrature oracle below; equals ln sqrt(pi)
        assert!((ln_gamma(0.5).unwrap() - 0.572_364_942_924_700_1).abs() < 1e-14);
    }

    #[test]
    fn ln_gamma_against_quadrature_oracle() {
        let oracle = gamma_half_by_quadrature();
        assert!(
            (oracle - std::f64::consts::PI.sqrt()).abs() < 1e-12,
            "oracle sanity: {oracle}"
        );
        assert!(rel_err(ln_gamma(0.5).unwrap(), oracle.ln()) < 1e-13);
    }

    #[test]
    fn ln_gamma_large_arguments() {
        // Γ(x+1) = x Γ(x) transported to logs, up to 1e6
        for &x in &[10.0, 171.5, 1e3, 1e5, 1e6] {
            let lhs = ln_gamma(x + 1.0).unwrap();
            let rhs = ln_gamma(x).unwrap() + x.ln();
            assert!(rel_err(lhs, rhs) < 1e-14, "x = {x}");
        }
    }

    #[test]
    fn ln_gamma_rejects_nonpositive() {
        assert!(ln_gamma(0.0).is_err());
        assert!(ln_gamma(-3.5).is_err());
        assert!(ln_gamma(f64::NAN).is_err());
    }

    #[test]
    fn rgamma_poles_and_values() {
        assert_eq!(rgamma(0.0), 0.0);
        assert_eq!(rgamma(-2.0), 0.0);
        assert_eq!(rgamma(-7.0 + 1e-13), 0.0);
        assert!((rgamma(3.0) - 0.5).abs() < 1e-15);
        assert!((rgamma(1.0) - 1.0).abs() < 1e-15);
        // reflection branch: 1/Γ(-0.5) = -1/(2 sqrt(pi))
        let want = -1.0 / (2.0 * std::f64::consts::PI.sqrt());
        assert!(rel_err(rgamma(-0.5), want) < 1e-13);
    }

    #[test]
    fn rgamma_inverts_ln_gamma() {
        let mut x = 0.5;
        while x <= 50.0 {
            let prod = rgamma(x) * ln_gamma(x).unwrap().exp();
            assert!((prod - 1.0).abs() < 1e-12, "x = {x}: {prod}");
            x += 0.5;
        }
    }

    #[test]
    fn digamma_trigamma_spot_values() {
        // ψ₀(1) = -γ, ψ₁(1) = π²/6
        assert!((digamma(1.0).unwrap() + 0.577_215_664_901_532_9).abs() < 1e-13);
        assert!((trigamma(1.0).unwrap() - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-13);
        let harmonic4 = 1.0 + 0.5 + 1.0 / 3.0 + 0.25;
        assert!((digamma(5.0).unwrap() - digamma(1.0).unwrap() - harmonic4).abs() < 1e-12);
    }

    #[test]
    fn psi_recurrences_hold() {
        let mut x = 1.0;
        while x <= 100.0 {
            let d = digamma(x + 1.0).unwrap() - digamma(x).unwrap() - 1.0 / x;
            let t = trigamma(x + 1.0).unwrap() - trigamma(x).unwrap() + 1.0 / (x * x);
            assert!(d.abs() < 1e-12, "digamma recurrence at {x}: {d}");
            assert!(t.abs() < 1e-12, "trigamma recurrence at {x}: {t}");
            x += 0.25;
        }
    }

    #[test]
    fn pochhammer_values() {
        assert_eq!(pochhammer(3.0, 2), 12.0);
        assert_eq!(pochhammer(-2.0, 3), 0.0);
        assert_eq!(pochhammer(0.5, 3), 1.875);
        assert_eq!(pochhammer(7.7, 0), 1.0);
    }

    #[test]
    fn pochhammer_matches_gamma_ratio() {
        for a in [0.25, 1.0, 2.5, 7.0] {
            for k in [0u32, 1, 3, 8, 15] {
                let via_gamma = (ln_gamma(a + f64::from(k)).unwrap() - ln_gamma(a).unwrap()).exp();
                assert!(
                    rel_err(pochhammer(a, k), via_gamma) < 1e-10,
                    "a = {a}, k = {k}"
                );
            }
        }
    }

    #[test]
    fn gen_binomial_values() {
        assert_eq!(gen_binomial(0.5, 2), -0.125);
        assert_eq!(gen_binomial(1.0, 3), 0.0);
        assert_eq!(gen_binomial(2.0, 2), 1.0);
        // integer tops give exact integer binomials
        assert_eq!(gen_binomial(6.0, 3), 20.0);
        assert_eq!(gen_binomial(10.0, 5), 252.0);
    }

    /// `Γ(m-k) (1-m)_k = (-1)^k Γ(m)` for `0 <= k < m <= 10`.
    #[test]
    fn gamma_shift_identity() {
        for m in 1..=10u32 {
            for k in 0..m {
                let lhs =
                    ln_gamma(f64::from(m - k)).unwrap().exp() * pochhammer(1.0 - f64::from(m), k);
                let rhs =
                    if k % 2 == 0 { 1.0 } else { -1.0 } * ln_gamma(f64::from(m)).unwrap().exp();
                assert!(rel_err(lhs, rhs) < 1e-12, "m = {m}, k = {k}");
            }
        }
    }

    /// Brute-force oracle: sum the Pochhammer products term by term.
    fn hyp3f2_bruteforce(a1: f64, a2: f64, a3: f64, b1: f64, b2: f64) -> f64 {
        let k_max = (-a1.round()) as u32;
        let mut sum = 0.0;
        for k in 0..=k_max {
            let num = pochhammer(a1, k) * pochhammer(a2, k) * pochhammer(a3, k);
            if num == 0.0 && pochhammer(a1, k) != 0.0 {
                continue;
            }
            sum += num / (pochhammer(b1, k) * pochhammer(b2, k) * factorial(k));
        }
        sum
    }

    #[test]
    fn hyp3f2_terminating_examples() {
        // empty sum beyond k = 0
        let one = hyp3f2_terminating(0.0, 3.3, -9.1, 0.4, 2.0).unwrap();
        assert_eq!(one.value, 1.0);

        // a3 = 0 kills all k >= 1 terms (q = 1 degeneracy shape)
        let m = 5.0;
        let n = 7.0;
        let v = hyp3f2_terminating(1.0 - m, -1.0, 0.0, -n, 2.0).unwrap();
        assert_eq!(v.value, 1.0);

        // two-term hand sum, frozen: 1 + (-1)(-2)(-1)/((-5)(2)(1)) = 1 + 1/5
        let v = hyp3f2_terminating(-1.0, -2.0, -1.0, -5.0, 2.0).unwrap();
        assert!((v.value - 1.2).abs() < 1e-15);
        assert!(rel_err(v.value, hyp3f2_bruteforce(-1.0, -2.0, -1.0, -5.0, 2.0)) < 1e-14);
    }

    #[test]
    fn hyp3f2_rejects_bad_upper_parameter() {
        assert!(hyp3f2_terminating(0.5, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(hyp3f2_terminating(2.0, 1.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn hyp3f2_denominator_pole_detected() {
        // b1 = -1 hits zero at k = 1 while terms are still live
        let err = hyp3f2_terminating(-3.0, 1.5, 2.5, -1.0, 2.0);
        assert!(matches!(err, Err(Error::DenominatorPole { .. })));
    }

    proptest! {
        #[test]
        fn hyp3f2_matches_bruteforce(
            m in 1u32..9,
            a2 in -4.0f64..4.0,
            a3 in -4.0f64..4.0,
            n_shift in 0u32..6,
        ) {
            // parameter shapes as used by the moment formulas: b1 < 1 - m
            let a1 = -(f64::from(m));
            let b1 = -(f64::from(m + n_shift)) - 0.5;
            let b2 = 2.0;
            let got = hyp3f2_terminating(a1, a2, a3, b1, b2).unwrap();
            let want = hyp3f2_bruteforce(a1, a2, a3, b1, b2);
            prop_assert!(
                (got.value - want).abs() <= 1e-10 * want.abs().max(1.0),
                "{} vs {}", got.value, want
            );
        }
    }
}

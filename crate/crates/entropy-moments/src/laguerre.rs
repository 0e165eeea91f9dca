//! Laguerre-ensemble machinery.
//!
//! The eigenvalues of `Y Y†` for a complex Ginibre `Y` form a determinantal
//! ensemble whose correlation kernel is built from generalized Laguerre
//! polynomials `L_k^{(n-m)}`. This module provides the polynomials, the
//! kernel, the one-point density in its two-polynomial form, and the
//! Schrödinger closed form for `∫ x^q e^{-x} L_s^{(α)} L_t^{(β)} dx` — the
//! integral every closed-form moment reduces to.

use crate::error::{Error, Result};
use crate::specfun::{self, LogScaled};
use num_rational::BigRational;
use serde::Serialize;

/// Subsystem dimensions `1 <= m <= n`.
///
/// `m` indexes the smaller subsystem whose reduced density matrix carries the
/// entanglement spectrum; `alpha = n - m` is the Laguerre weight exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Dims {
    m: u32,
    n: u32,
}

impl Dims {
    pub fn new(m: u32, n: u32) -> Result<Self> {
        if m == 0 || m > n {
            return Err(Error::InvalidDims { m, n });
        }
        Ok(Dims { m, n })
    }

    pub fn m(self) -> u32 {
        self.m
    }

    pub fn n(self) -> u32 {
        self.n
    }

    /// `n - m`, the order of the Laguerre weight `x^{n-m} e^{-x}`.
    pub fn alpha(self) -> u32 {
        self.n - self.m
    }

    /// Total Hilbert-space dimension `m * n`.
    pub fn mn(self) -> u64 {
        u64::from(self.m) * u64::from(self.n)
    }
}

impl std::fmt::Display for Dims {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.m, self.n)
    }
}

/// Generalized Laguerre polynomial `L_k^{(alpha)}(x)` by the three-term
/// recurrence `(k+1) L_{k+1} = (2k + α + 1 - x) L_k - (k + α) L_{k-1}`.
///
/// `L_{-1} ≡ 0` by convention (handled by the caller passing `k >= 0`).
pub fn laguerre_poly(k: u32, alpha: f64, x: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = alpha + 1.0 - x;
    for j in 1..k {
        let jf = f64::from(j);
        let next = ((2.0 * jf + alpha + 1.0 - x) * cur - (jf + alpha) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Shared recurrence for the orthonormalized Laguerre series
/// `sqrt((k+1)(k+1+α)) u_{k+1} = (2k + α + 1 - x) u_k - sqrt(k(k+α)) u_{k-1}`
/// seeded with `u_0 = start`; any per-`x` prefactor folded into `start`
/// propagates unchanged.
fn orthonormal_series(alpha: f64, count: usize, x: f64, start: f64, out: &mut Vec<f64>) {
    out.clear();
    if count == 0 {
        return;
    }
    let mut prev = 0.0;
    let mut cur = start;
    out.push(cur);
    for k in 0..count - 1 {
        let kf = k as f64;
        let next = ((2.0 * kf + alpha + 1.0 - x) * cur - (kf * (kf + alpha)).sqrt() * prev)
            / ((kf + 1.0) * (kf + 1.0 + alpha)).sqrt();
        prev = cur;
        cur = next;
        out.push(cur);
    }
}

/// Orthonormalized kernel summands `φ_k(x) = L_k^{(α)}(x) sqrt(k!/(α+k)!) x^{α/2} e^{-x/2}`
/// for `k = 0..m`, written into `out`.
///
/// The normalization and weight are folded into the starting value so no
/// intermediate reaches `k! (α+k)!` scale.
fn orthonormal_weighted(dims: Dims, x: f64, out: &mut Vec<f64>) {
    let alpha = f64::from(dims.alpha());
    let ln_phi0 = if x > 0.0 {
        0.5 * alpha * x.ln() - 0.5 * x - 0.5 * specfun::ln_gamma(alpha + 1.0).expect("alpha >= 0")
    } else if dims.alpha() == 0 {
        0.0
    } else {
        f64::NEG_INFINITY
    };
    orthonormal_series(alpha, dims.m as usize, x, ln_phi0.exp(), out);
}

/// Polynomial part only: `p_k(x) = L_k^{(α)}(x) sqrt(k!/(α+k)!)`, so that
/// `K(x, y) = (xy)^{α/2} e^{-(x+y)/2} Σ p_k(x) p_k(y)`. Used by the
/// quadrature oracles, which keep the weight inside the quadrature rule.
pub(crate) fn orthonormal_polys(dims: Dims, x: f64, out: &mut Vec<f64>) {
    let alpha = f64::from(dims.alpha());
    let start = (-0.5 * specfun::ln_gamma(alpha + 1.0).expect("alpha >= 0")).exp();
    orthonormal_series(alpha, dims.m as usize, x, start, out);
}

/// Correlation kernel `K(x, y)` of the Laguerre ensemble.
///
/// Evaluated as `Σ_{k<m} φ_k(x) φ_k(y)` over the orthonormalized weighted
/// polynomials, so nothing overflows even at `m n ~ 4096`.
pub fn kernel(dims: Dims, x: f64, y: f64) -> Result<f64> {
    for v in [x, y] {
        if v.is_nan() || v < 0.0 {
            return Err(Error::Domain {
                func: "kernel",
                value: v,
                constraint: "x >= 0",
            });
        }
    }
    let mut fx = Vec::new();
    let mut fy = Vec::new();
    orthonormal_weighted(dims, x, &mut fx);
    orthonormal_weighted(dims, y, &mut fy);
    Ok(fx.iter().zip(&fy).map(|(a, b)| a * b).sum())
}

/// One-point eigenvalue density (unnormalized: integrates to `m`), in the
/// two-polynomial representation
/// `m!/(n-1)! x^{n-m} e^{-x} ((L_{m-1}^{(α+1)})² - L_{m-2}^{(α+1)} L_m^{(α+1)})`
/// with `L_{-1} ≡ 0` so `m = 1` degenerates to the single square.
pub fn density_one_point(dims: Dims, x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::Domain {
            func: "density_one_point",
            value: x,
            constraint: "x >= 0",
        });
    }
    let m = dims.m;
    let a1 = f64::from(dims.alpha()) + 1.0;
    let l_m1 = laguerre_poly(m - 1, a1, x);
    let l_m = laguerre_poly(m, a1, x);
    let l_m2 = if m >= 2 {
        laguerre_poly(m - 2, a1, x)
    } else {
        0.0
    };
    let ln_prefactor =
        specfun::ln_gamma(f64::from(m) + 1.0)? - specfun::ln_gamma(f64::from(dims.n))? - x
            + if x > 0.0 {
                f64::from(dims.alpha()) * x.ln()
            } else if dims.alpha() == 0 {
                0.0
            } else {
                return Ok(0.0);
            };
    Ok(ln_prefactor.exp() * (l_m1 * l_m1 - l_m2 * l_m))
}

/// Schrödinger's closed form for `∫₀^∞ x^q e^{-x} L_s^{(α)}(x) L_t^{(β)}(x) dx`:
///
/// `(-1)^{s+t} Σ_{k=0}^{min(s,t)} C(q-α, s-k) C(q-β, t-k) Γ(k+q+1)/k!`,
///
/// valid for `q > -1`, accumulated in log-scaled arithmetic with sign
/// tracking. The binomials are running products, so parameter combinations
/// that make the printed gamma-ratio forms hit poles are resolved termwise.
pub fn schrodinger_integral(
    s: u32,
    t: u32,
    alpha: f64,
    beta: f64,
    q_exp: f64,
) -> Result<LogScaled> {
    if q_exp.is_nan() || q_exp <= -1.0 {
        return Err(Error::Domain {
            func: "schrodinger_integral",
            value: q_exp,
            constraint: "q > -1",
        });
    }
    let mut sum = LogScaled::ZERO;
    for k in 0..=s.min(t) {
        let b1 = specfun::gen_binomial(q_exp - alpha, s - k);
        let b2 = specfun::gen_binomial(q_exp - beta, t - k);
        let ln_gamma_term =
            specfun::ln_gamma(f64::from(k) + q_exp + 1.0)? - specfun::ln_gamma(f64::from(k) + 1.0)?;
        let term =
            LogScaled::from_f64(b1) * LogScaled::from_f64(b2) * LogScaled::from_ln(ln_gamma_term);
        sum = sum + term;
    }
    if (s + t) % 2 == 1 {
        sum = -sum;
    }
    Ok(sum)
}

/// Exact-rational Schrödinger integral for integer parameters (`q_exp` is the
/// full exponent, e.g. `n - m + q` with integer `q`). Requires `q_exp >= 0`.
pub fn schrodinger_integral_rational(
    s: u32,
    t: u32,
    alpha: i64,
    beta: i64,
    q_exp: i64,
) -> Result<BigRational> {
    use crate::specfun::rational::{rat_factorial, rat_gen_binomial, rat_int};
    if q_exp < 0 {
        return Err(Error::Domain {
            func: "schrodinger_integral_rational",
            value: q_exp as f64,
            constraint: "q >= 0",
        });
    }
    let mut sum = BigRational::from_integer(0.into());
    for k in 0..=s.min(t) {
        let b1 = rat_gen_binomial(&rat_int(q_exp - alpha), s - k);
        let b2 = rat_gen_binomial(&rat_int(q_exp - beta), t - k);
        // Γ(k + q + 1)/k! = (q + k)! / k!
        let gamma_ratio = rat_factorial((q_exp as u32) + k) / rat_factorial(k);
        sum += b1 * b2 * gamma_ratio;
    }
    if (s + t) % 2 == 1 {
        sum = -sum;
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::rational::{rat_factorial, rat_int};
    use proptest::prelude::*;

    fn rel_err(got: f64, want: f64) -> f64 {
        (got - want).abs() / want.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn dims_validation() {
        assert!(Dims::new(0, 3).is_err());
        assert!(Dims::new(4, 3).is_err());
        let d = Dims::new(3, 7).unwrap();
        assert_eq!(d.alpha(), 4);
        assert_eq!(d.mn(), 21);
    }

    /// Explicit-sum oracle: `L_k^{(α)}(x) = Σ_i (-1)^i C(α+k, k-i) x^i / i!`.
    /// Also returns the largest term magnitude, which bounds how much
    /// cancellation the alternating sum suffered.
    fn laguerre_explicit(k: u32, alpha: f64, x: f64) -> (f64, f64) {
        let mut sum = 0.0;
        let mut max_term = 0.0f64;
        for i in 0..=k {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            let term = specfun::gen_binomial(alpha + f64::from(k), k - i) * x.powi(i as i32)
                / specfun::factorial(i);
            max_term = max_term.max(term.abs());
            sum += sign * term;
        }
        (sum, max_term)
    }

    #[test]
    fn laguerre_poly_low_orders() {
        assert_eq!(laguerre_poly(0, 3.5, 2.0), 1.0);
        // L_1^{(α)}(x) = α + 1 - x
        assert_eq!(laguerre_poly(1, 2.5, 0.75), 2.5 + 1.0 - 0.75);
        // value at zero is C(α+k, k)
        assert!(rel_err(laguerre_poly(2, 0.0, 0.0), 1.0) < 1e-14);
        assert!(rel_err(laguerre_poly(4, 3.0, 0.0), specfun::gen_binomial(7.0, 4)) < 1e-14);
    }

    proptest! {
        #[test]
        fn laguerre_recurrence_matches_explicit_sum(
            k in 0u32..=30,
            alpha in 0.0f64..12.0,
            x in 0.0f64..40.0,
        ) {
            let rec = laguerre_poly(k, alpha, x);
            let (expl, max_term) = laguerre_explicit(k, alpha, x);
            // the explicit sum loses digits to cancellation at large x, so
            // the honest comparison scale is its largest term
            prop_assert!(
                (rec - expl).abs() <= 1e-12 * max_term.max(1.0),
                "k={k} alpha={alpha} x={x}: {rec} vs {expl} (term scale {max_term})"
            );
        }

        /// Against the explicit sum evaluated in exact rational arithmetic
        /// the agreement is genuinely relative over the whole domain.
        #[test]
        fn laguerre_matches_exact_explicit_sum(
            k in 0u32..=30,
            alpha in 0.0f64..12.0,
            x in 0.0f64..40.0,
        ) {
            use crate::specfun::rational::{rat_factorial, rat_gen_binomial, to_f64};
            use num_rational::BigRational;

            let rec = laguerre_poly(k, alpha, x);
            let alpha_r = BigRational::from_float(alpha).unwrap();
            let x_r = BigRational::from_float(x).unwrap();
            let mut sum = BigRational::from_integer(0.into());
            let mut x_pow = BigRational::from_integer(1.into());
            for i in 0..=k {
                let top = &alpha_r + BigRational::from_integer(i64::from(k).into());
                let term = rat_gen_binomial(&top, k - i) * &x_pow / rat_factorial(i);
                sum += if i % 2 == 0 { term } else { -term };
                x_pow *= &x_r;
            }
            let expl = to_f64(&sum);
            prop_assert!(
                (rec - expl).abs() <= 1e-10 * expl.abs().max(1e-10),
                "k={k} alpha={alpha} x={x}: {rec} vs {expl}"
            );
        }

        #[test]
        fn kernel_is_symmetric(
            m in 1u32..7,
            extra in 0u32..5,
            x in 0.0f64..30.0,
            y in 0.0f64..30.0,
        ) {
            let dims = Dims::new(m, m + extra).unwrap();
            let kxy = kernel(dims, x, y).unwrap();
            let kyx = kernel(dims, y, x).unwrap();
            prop_assert!((kxy - kyx).abs() <= 1e-12 * kxy.abs().max(1e-300));
        }
    }

    #[test]
    fn kernel_1x1_is_plain_exponential() {
        let dims = Dims::new(1, 1).unwrap();
        for &x in &[0.0, 0.3, 1.7, 9.0] {
            assert!(rel_err(kernel(dims, x, x).unwrap(), (-x).exp()) < 1e-13);
        }
    }

    #[test]
    fn kernel_survives_large_dimensions() {
        // normalization folding keeps everything finite up to mn ~ 4096,
        // where naive k!(n-m+k)! products would overflow
        for (m, n) in [(64u32, 64u32), (1, 4096), (16, 256), (2, 2048)] {
            let dims = Dims::new(m, n).unwrap();
            for &x in &[0.5, f64::from(n) * 0.7, f64::from(n + m)] {
                let k = kernel(dims, x, x).unwrap();
                assert!(k.is_finite() && k >= 0.0, "K(x,x) at ({m},{n}), x={x}: {k}");
            }
        }
    }

    #[test]
    fn density_integrates_to_m() {
        // ∫ density_one_point = m, via its own quadrature (weight folded in
        // the density, so integrate against e^{-x} after multiplying back)
        let dims = Dims::new(3, 5).unwrap();
        let rule = crate::quadrature::GaussLaguerre::build(64, 0.0).unwrap();
        let got = rule.integrate(|x| density_one_point(dims, x).unwrap() * x.exp());
        assert!((got - 3.0).abs() < 1e-9, "{got}");
    }

    #[test]
    fn kernel_rejects_negative_arguments() {
        let dims = Dims::new(2, 3).unwrap();
        assert!(kernel(dims, -0.1, 1.0).is_err());
        assert!(kernel(dims, 1.0, -2.0).is_err());
        assert!(density_one_point(dims, -1e-9).is_err());
    }

    #[test]
    fn density_m1_is_gamma_density_shape() {
        // m = 1: density is x^{n-1} e^{-x} / (n-1)!
        for n in [1u32, 2, 5, 9] {
            let dims = Dims::new(1, n).unwrap();
            for &x in &[0.2f64, 1.0, 4.5] {
                let want = x.powi(n as i32 - 1) * (-x).exp() / specfun::factorial(n - 1);
                assert!(
                    rel_err(density_one_point(dims, x).unwrap(), want) < 1e-12,
                    "n={n} x={x}"
                );
            }
        }
    }

    #[test]
    fn density_agrees_with_kernel_diagonal() {
        let dims = Dims::new(4, 7).unwrap();
        for &x in &[0.5, 2.0, 10.0] {
            let d = density_one_point(dims, x).unwrap();
            let k = kernel(dims, x, x).unwrap();
            assert!(rel_err(d, k) < 1e-9, "x={x}: {d} vs {k}");
        }
        // and for the m = 1 and m = 2 degenerate shapes of the convention
        for (m, n) in [(1u32, 4u32), (2, 2), (2, 6)] {
            let dims = Dims::new(m, n).unwrap();
            for &x in &[0.1, 1.0, 6.0] {
                let d = density_one_point(dims, x).unwrap();
                let k = kernel(dims, x, x).unwrap();
                assert!(rel_err(d, k) < 1e-9, "m={m} n={n} x={x}");
            }
        }
    }

    #[test]
    fn density_nonnegative_on_log_grid() {
        for m in 1..=6u32 {
            for n in m..=10 {
                let dims = Dims::new(m, n).unwrap();
                let hi = 10.0 * f64::from(n + m);
                let lo = 1e-6f64;
                for i in 0..=60 {
                    let x = lo * (hi / lo).powf(f64::from(i) / 60.0);
                    let d = density_one_point(dims, x).unwrap();
                    assert!(d >= -1e-13, "negative density {d} at m={m} n={n} x={x}");
                }
            }
        }
    }

    #[test]
    fn schrodinger_low_order_values() {
        // s = t = 0: plain gamma integral
        let v = schrodinger_integral(0, 0, 2.0, 2.0, 1.5).unwrap();
        let want = specfun::ln_gamma(2.5).unwrap().exp();
        assert!(rel_err(v.to_f64(), want) < 1e-13);

        // s = 1, t = 0: (α - q) Γ(q + 1)
        let (alpha, q) = (3.0, 1.25);
        let v = schrodinger_integral(1, 0, alpha, 7.0, q).unwrap();
        let want = (alpha - q) * specfun::ln_gamma(q + 1.0).unwrap().exp();
        assert!(rel_err(v.to_f64(), want) < 1e-13);
    }

    #[test]
    fn schrodinger_rejects_low_exponent() {
        assert!(schrodinger_integral(0, 0, 0.0, 0.0, -1.0).is_err());
        assert!(schrodinger_integral(0, 0, 0.0, 0.0, -1.5).is_err());
    }

    /// Orthogonality: at `q = α` the integral collapses to
    /// `δ_{st} (α+s)!/s!`, exactly in rational mode (α ∈ {0,1,2}, s,t ≤ 5).
    #[test]
    fn schrodinger_orthogonality_exact() {
        for alpha in 0..=2i64 {
            for s in 0..=5u32 {
                for t in 0..=5u32 {
                    let v = schrodinger_integral_rational(s, t, alpha, alpha, alpha).unwrap();
                    let want = if s == t {
                        rat_factorial(alpha as u32 + s) / rat_factorial(s)
                    } else {
                        rat_int(0)
                    };
                    assert_eq!(v, want, "alpha={alpha} s={s} t={t}");
                }
            }
        }
    }

    /// Orthogonality diagonal: s = t = 2 at `α = β = q = n - m`
    /// gives `(n-m+2)!/2!`.
    #[test]
    fn schrodinger_orthogonality_diagonal_float() {
        for alpha in [0.0f64, 1.0, 2.0, 5.0] {
            let v = schrodinger_integral(2, 2, alpha, alpha, alpha).unwrap();
            let want = specfun::ln_gamma(alpha + 3.0).unwrap().exp() / 2.0;
            assert!(rel_err(v.to_f64(), want) < 1e-12, "alpha={alpha}");
        }
    }

    /// The pair integral the moment formulas call `A_{0,1}` at q=2, n=m:
    /// `∫ x² e^{-x} L_0 L_1 dx = Γ(3) - Γ(4) = -4`, fixing the sign
    /// convention against the brute-force integral.
    #[test]
    fn schrodinger_signed_value_0_1() {
        let v = schrodinger_integral(0, 1, 0.0, 0.0, 2.0).unwrap();
        assert!((v.to_f64() + 4.0).abs() < 1e-12);
        let r = schrodinger_integral_rational(0, 1, 0, 0, 2).unwrap();
        assert_eq!(r, rat_int(-4));
    }

    proptest! {
        /// Float and rational Schrödinger integrals agree for integer input.
        #[test]
        fn schrodinger_float_vs_rational(
            s in 0u32..6,
            t in 0u32..6,
            alpha in 0i64..5,
            q in 0i64..7,
        ) {
            let f = schrodinger_integral(s, t, alpha as f64, alpha as f64, q as f64)
                .unwrap()
                .to_f64();
            let r = schrodinger_integral_rational(s, t, alpha, alpha, q).unwrap();
            let want = crate::specfun::rational::to_f64(&r);
            prop_assert!(
                (f - want).abs() <= 1e-11 * want.abs().max(1.0),
                "s={s} t={t} alpha={alpha} q={q}: {f} vs {want}"
            );
        }

        /// Symmetry in (s, t) — the integrand is symmetric when α = β.
        #[test]
        fn schrodinger_symmetric(
            s in 0u32..8,
            t in 0u32..8,
            alpha in 0.0f64..4.0,
            q in -0.9f64..6.0,
        ) {
            let a = schrodinger_integral(s, t, alpha, alpha, q).unwrap().to_f64();
            let b = schrodinger_integral(t, s, alpha, alpha, q).unwrap().to_f64();
            prop_assert!((a - b).abs() <= 1e-11 * a.abs().max(1e-300));
        }
    }
}

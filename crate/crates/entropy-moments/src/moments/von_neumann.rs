//! The von Neumann branch: `q -> 1` of the Tsallis chain.
//!
//! Two independent routes to the variance are provided. The direct digamma /
//! trigamma formulas, and the full limit chain obtained by applying
//! l'Hôpital twice to the second-moment conversion — the latter reproduces
//! the identity proof numerically and must agree with the former to 1e-10.
//! A third, purely numerical route (Richardson extrapolation of the Tsallis
//! variance in `q`) backs both.

use crate::error::{Error, Result};
use crate::laguerre::Dims;
use crate::specfun::{digamma, trigamma};

/// Mean von Neumann entropy `E_f[S] = ψ₀(mn + 1) - ψ₀(n) - (m + 1)/(2n)`.
///
/// `m = 1` short-circuits to 0: the spectrum is deterministically `{1}` and
/// the formula cancels exactly only in infinite precision.
pub fn von_neumann_mean(dims: Dims) -> f64 {
    if dims.m() == 1 {
        return 0.0;
    }
    let mn = dims.mn() as f64;
    let m = f64::from(dims.m());
    let n = f64::from(dims.n());
    digamma(mn + 1.0).expect("mn >= 1") - digamma(n).expect("n >= 1") - (m + 1.0) / (2.0 * n)
}

/// Variance of the von Neumann entropy,
/// `V_f[S] = -ψ₁(mn+1) + (m+n)/(mn+1) ψ₁(n) - (m+1)(m+2n+1)/(4n²(mn+1))`.
pub fn von_neumann_variance(dims: Dims) -> f64 {
    if dims.m() == 1 {
        return 0.0;
    }
    let mn = dims.mn() as f64;
    let m = f64::from(dims.m());
    let n = f64::from(dims.n());
    -trigamma(mn + 1.0).expect("mn >= 1") + (m + n) / (mn + 1.0) * trigamma(n).expect("n >= 1")
        - (m + 1.0) * (m + 2.0 * n + 1.0) / (4.0 * n * n * (mn + 1.0))
}

/// The same variance assembled through the `q -> 1` limit of the
/// second-moment conversion (two applications of l'Hôpital):
///
/// `E_f[S²]` is built from `E_g[R]`, `E_g[R²]`, `E_g[rR]`, the gamma-trace
/// log-moments `E_r[r² ln r]`, `E_r[r² ln² r]`, and `E_f[S]`. The
/// second-log-moment `E_g[R₂]` cancels between the limit expression and the
/// `E_f[S₂]` substitution, so it is never evaluated — the assembly below has
/// it already eliminated symbolically.
pub fn von_neumann_variance_via_moment_chain(dims: Dims) -> f64 {
    if dims.m() == 1 {
        return 0.0;
    }
    let mn = dims.mn() as f64;
    let m = f64::from(dims.m());
    let n = f64::from(dims.n());

    let psi0_mn1 = digamma(mn + 1.0).expect("mn >= 1");
    let psi0_mn2 = digamma(mn + 2.0).expect("mn >= 1");
    let psi1_mn2 = trigamma(mn + 2.0).expect("mn >= 1");
    let psi0_n = digamma(n).expect("n >= 1");
    let psi1_n = trigamma(n).expect("n >= 1");

    // induced log-moments over the Laguerre ensemble
    let e_g_r = mn * psi0_n + 0.5 * m * (m + 1.0);
    let e_g_r2 = mn * (m + n) * psi1_n
        + mn * (mn + 1.0) * psi0_n * psi0_n
        + m * (m * m * n + mn + m + 2.0 * n + 1.0) * psi0_n
        + 0.25 * m * (m + 1.0) * (m * m + m + 2.0);
    let e_g_rr = mn * (mn + 1.0) * (psi0_n + 1.0 / (mn + 1.0) + (m + 1.0) / (2.0 * n));

    // gamma-trace log-moments: ∫ e^{-r} r^{a-1} ln r dr = Γ(a) ψ₀(a) and its
    // ln² analogue give E_r[r² ln r] and E_r[r² ln² r]
    let w1 = mn * (mn + 1.0) * psi0_mn2;
    let w2 = mn * (mn + 1.0) * (psi1_mn2 + psi0_mn2 * psi0_mn2);

    let mean = von_neumann_mean(dims);

    let e_f_s2 = 2.0 * e_g_r * psi0_mn1 / mn
        - 2.0 * psi0_mn1 * (psi0_n + (m + 1.0) / (2.0 * n))
        - 2.0 * (psi1_mn2 - psi0_mn2 * psi0_mn2)
        + (e_g_r2 + w2 - 2.0 * w1 * mean - 4.0 * e_g_rr * psi0_mn2) / (mn * (mn + 1.0));

    e_f_s2 - mean * mean
}

/// Central Richardson extrapolation of the Tsallis variance toward `q = 1`,
/// sampling `q ∈ {1 ± eps, 1 ± eps/2}`: the averaged pair kills the odd
/// error terms, the 4:1 combination kills the `eps²` term.
pub fn tsallis_variance_q1_limit(dims: Dims, eps: f64) -> Result<f64> {
    if eps.is_nan() || eps <= 0.0 || eps > 1e-2 {
        return Err(Error::Domain {
            func: "tsallis_variance_q1_limit",
            value: eps,
            constraint: "0 < eps <= 1e-2",
        });
    }
    if dims.m() == 1 {
        return Ok(0.0);
    }
    let pair = |h: f64| -> Result<f64> {
        Ok((variance_unguarded(dims, 1.0 + h)? + variance_unguarded(dims, 1.0 - h)?) / 2.0)
    };
    let coarse = pair(eps)?;
    let fine = pair(eps / 2.0)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Tsallis variance without the near-`q = 1` refusal: this *is* the limit
/// machinery the guard points callers to.
fn variance_unguarded(dims: Dims, q: f64) -> Result<f64> {
    use crate::specfun::LogScaled;
    let e_l = super::induced_mean(dims, q)?;
    let e_l2 = super::induced_second(dims, q)?;
    let induced = [LogScaled::ONE, e_l, e_l2];
    let e_t = super::convert_moment(1, dims, q, &induced[..2])?;
    let e_t2 = super::convert_moment(2, dims, q, &induced)?;
    Ok(e_t2 - e_t * e_t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dims(m: u32, n: u32) -> Dims {
        Dims::new(m, n).unwrap()
    }

    /// Independent trigamma evaluation for small integer arguments:
    /// `ψ₁(k) = π²/6 - Σ_{j<k-1} 1/(j+1)²`; only uses the π²/6 constant and
    /// rational arithmetic, not the library's trigamma.
    fn trigamma_int(k: u32) -> f64 {
        let mut v = std::f64::consts::PI * std::f64::consts::PI / 6.0;
        for j in 1..k {
            v -= 1.0 / f64::from(j * j);
        }
        v
    }

    #[test]
    fn mean_spot_values() {
        assert_eq!(von_neumann_mean(dims(1, 1)), 0.0);
        // ψ₀(5) - ψ₀(2) - 3/4 = (1/2 + 1/3 + 1/4) - 3/4 = 1/3
        assert!((von_neumann_mean(dims(2, 2)) - 1.0 / 3.0).abs() < 1e-13);
        // n >> m approaches the maximally-entangled value ln m
        assert!((von_neumann_mean(dims(2, 1000)) - 2.0f64.ln()).abs() < 0.01);
    }

    #[test]
    fn mean_is_within_entropy_range() {
        for m in 1..=8u32 {
            for n in m..=12 {
                let s = von_neumann_mean(dims(m, n));
                assert!(s >= 0.0 && s <= f64::from(m).ln() + 1e-12, "({m},{n}): {s}");
            }
        }
    }

    #[test]
    fn variance_2_2_frozen_value() {
        // -ψ₁(5) + (4/5) ψ₁(2) - 21/80, from the independent trigamma route
        let want = -trigamma_int(5) + 0.8 * trigamma_int(2) - 21.0 / 80.0;
        assert!(
            (want - 0.032_124_297_741_465_9).abs() < 1e-14,
            "oracle {want}"
        );
        let got = von_neumann_variance(dims(2, 2));
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }

    #[test]
    fn variance_nonnegative_and_zero_for_m1() {
        assert_eq!(von_neumann_variance(dims(1, 1)), 0.0);
        assert_eq!(von_neumann_variance(dims(1, 9)), 0.0);
        for m in 2..=8u32 {
            for n in m..=12 {
                assert!(von_neumann_variance(dims(m, n)) > 0.0, "({m},{n})");
            }
        }
    }

    #[test]
    fn moment_chain_identity() {
        for m in 1..=8u32 {
            for n in m..=12 {
                let direct = von_neumann_variance(dims(m, n));
                let chain = von_neumann_variance_via_moment_chain(dims(m, n));
                let tol = 1e-10 * direct.abs().max(1e-300);
                assert!(
                    (direct - chain).abs() <= tol || (m == 1 && chain == 0.0),
                    "({m},{n}): {direct} vs {chain}"
                );
            }
        }
    }

    #[test]
    fn q1_limit_matches_variance() {
        for (m, n) in [(2u32, 2u32), (2, 3), (3, 4), (1, 4)] {
            let d = dims(m, n);
            let lim = tsallis_variance_q1_limit(d, 1e-3).unwrap();
            let want = von_neumann_variance(d);
            assert!((lim - want).abs() < 1e-6, "({m},{n}): {lim} vs {want}");
        }
    }

    #[test]
    fn q1_limit_validates_eps() {
        let d = dims(2, 2);
        assert!(tsallis_variance_q1_limit(d, 0.0).is_err());
        assert!(tsallis_variance_q1_limit(d, 0.02).is_err());
        assert!(tsallis_variance_q1_limit(d, 1e-2).is_ok());
    }
}

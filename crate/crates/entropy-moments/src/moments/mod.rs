//! Closed-form entropy moments.
//!
//! The chain: the induced entropy `L = Σ θᵢ^q` of the Laguerre ensemble has
//! first and second moments expressible through terminating `₃F₂` sums and
//! Schrödinger pair integrals; the fixed-trace moments of the Tsallis entropy
//! then follow from the gamma-ratio conversion
//!
//! `E_f[T^k] = Γ(mn)/(q-1)^k Σ_i C(k,i) (-1)^i E_g[L^i] / Γ(mn + q i)`.
//!
//! Special cases (quadratic `q = 2`, small `m`, von Neumann `q = 1`) have
//! their own closed forms, which this module cross-checks against the general
//! path whenever it selects them.

pub mod exact;
mod von_neumann;

pub use exact::ExactMoments;
pub use von_neumann::{
    tsallis_variance_q1_limit, von_neumann_mean, von_neumann_variance,
    von_neumann_variance_via_moment_chain,
};

use crate::error::{Error, Result};
use crate::laguerre::{self, Dims};
use crate::specfun::{self, LogScaled};
use serde::Serialize;

/// Tsallis order `q`, validated to the supported range `q > -1`, `q != 0`.
///
/// `q = 1` is valid and denotes the von Neumann branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyOrder(f64);

impl EntropyOrder {
    pub fn new(q: f64) -> Result<Self> {
        if !q.is_finite() {
            return Err(Error::InvalidOrder {
                q,
                reason: "q must be finite",
            });
        }
        if q <= -1.0 {
            return Err(Error::InvalidOrder {
                q,
                reason: "the moment formulas require q > -1",
            });
        }
        if q == 0.0 {
            return Err(Error::InvalidOrder {
                q,
                reason: "q = 0 is excluded (Tsallis entropy undefined)",
            });
        }
        Ok(EntropyOrder(q))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_von_neumann(self) -> bool {
        self.0 == 1.0
    }
}

/// Which closed-form route produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    General,
    Quadratic,
    SmallM,
    VonNeumann,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Method::General => "general",
            Method::Quadratic => "quadratic",
            Method::SmallM => "small_m",
            Method::VonNeumann => "von_neumann",
        };
        f.write_str(s)
    }
}

/// How much exact (rational) arithmetic to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Float path, with the exact path attached and cross-validated whenever
    /// it is available (integer `q >= 2`, small dims).
    #[default]
    Auto,
    /// Float path only.
    Float,
    /// Exact path required; errors where it is not defined.
    Exact,
}

/// Moments of one `(m, n, q)` cell.
///
/// `e_t`/`e_t2`/`var_t` are the fixed-trace entropy moments (von Neumann `S`
/// moments when `method == VonNeumann`); `e_l`/`e_l2` the induced Laguerre
/// moments that fed them.
#[derive(Debug, Clone)]
pub struct MomentReport {
    pub dims: Dims,
    pub q: f64,
    pub e_l: LogScaled,
    pub e_l2: LogScaled,
    pub e_t: f64,
    pub e_t2: f64,
    pub var_t: f64,
    pub method: Method,
    pub cancellation_flags: Vec<String>,
    /// Exact rationals when the exact path applies.
    pub exact: Option<ExactMoments>,
}

impl MomentReport {
    /// Returns the invariant violations of this report (empty when healthy):
    /// variance non-negativity up to roundoff and the mean bound
    /// `0 <= E[T] <= max entropy`.
    pub fn invariant_violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.var_t < -1e-12 {
            v.push(format!("variance {} < -1e-12", self.var_t));
        }
        if self.q > 0.0 {
            let bound = max_tsallis_entropy(self.dims.m(), self.q) + 1e-12;
            if self.e_t < -1e-12 || self.e_t > bound {
                v.push(format!("mean {} outside [0, {bound}]", self.e_t));
            }
        }
        let recomputed = self.e_t2 - self.e_t * self.e_t;
        if (self.var_t - recomputed).abs() > f64::EPSILON * self.e_t2.abs().max(1.0) {
            v.push("var_t is not the direct subtraction e_t2 - e_t^2".to_string());
        }
        v
    }
}

/// `|q - 1|` below which the direct conversion is refused: the bracket of the
/// second-moment relation is `O((q-1)^2)`, so at 1e-3 roughly six significant
/// digits survive the division and anything closer is noise.
pub const VON_NEUMANN_GUARD: f64 = 1e-3;

/// Cancellation flags beyond this many digits are reported in the output.
const FLAG_DIGITS: f64 = 6.0;

/// First moment of the induced entropy over the Laguerre ensemble,
/// `E_g[L] = m Γ(n+q)/(n-1)! ₃F₂(1-m, -q, 1-q; 1-n-q, 2; 1)`, for `q > -1`,
/// `q != 0`.
pub fn induced_mean(dims: Dims, q: f64) -> Result<LogScaled> {
    induced_mean_flagged(dims, q, &mut Vec::new())
}

fn induced_mean_flagged(dims: Dims, q: f64, flags: &mut Vec<String>) -> Result<LogScaled> {
    EntropyOrder::new(q)?;
    let m = f64::from(dims.m());
    let n = f64::from(dims.n());
    let sum = specfun::hyp3f2_terminating(1.0 - m, -q, 1.0 - q, 1.0 - n - q, 2.0)?;
    note_cancellation(flags, "E_g[L] series", &sum);
    let prefactor = LogScaled::from_ln(specfun::ln_gamma(n + q)? - specfun::ln_gamma(n)?).scale(m);
    Ok(prefactor * LogScaled::from_f64(sum.value))
}

/// The Laguerre pair integral `A_{i,j} = ∫ x^{n-m+q} e^{-x} L_i^{(n-m)} L_j^{(n-m)} dx`
/// entering the second moment, evaluated termwise so parameter combinations
/// where `Γ(q - i + 1)` sits on a pole never divide gammas at poles.
pub fn laguerre_pair_moment(i: u32, j: u32, dims: Dims, q: f64) -> Result<LogScaled> {
    EntropyOrder::new(q)?;
    if i >= dims.m() || j >= dims.m() {
        return Err(Error::Domain {
            func: "laguerre_pair_moment",
            value: f64::from(i.max(j)),
            constraint: "i, j <= m - 1",
        });
    }
    let alpha = f64::from(dims.alpha());
    laguerre::schrodinger_integral(i, j, alpha, alpha, alpha + q)
}

/// Second moment of the induced entropy, assembled as
/// `E_g[L²] = (E_g[L])² + I₁ - I₂` with `I₁` the `2q` series and `I₂` the
/// double sum of squared pair integrals. Requires `q > -1/2` (the `I₁` piece
/// evaluates the series at `2q`).
pub fn induced_second(dims: Dims, q: f64) -> Result<LogScaled> {
    induced_second_flagged(dims, q, &mut Vec::new())
}

fn induced_second_flagged(dims: Dims, q: f64, flags: &mut Vec<String>) -> Result<LogScaled> {
    EntropyOrder::new(q)?;
    if q <= -0.5 {
        return Err(Error::Domain {
            func: "induced_second",
            value: q,
            constraint: "q > -1/2 (the I1 piece needs 2q > -1)",
        });
    }
    let m = dims.m();
    let n = f64::from(dims.n());
    let alpha = dims.alpha();

    let mean = induced_mean_flagged(dims, q, flags)?;

    let i1_sum = specfun::hyp3f2_terminating(
        1.0 - f64::from(m),
        -2.0 * q,
        1.0 - 2.0 * q,
        1.0 - n - 2.0 * q,
        2.0,
    )?;
    note_cancellation(flags, "I1 series", &i1_sum);
    let i1 = LogScaled::from_ln(specfun::ln_gamma(n + 2.0 * q)? - specfun::ln_gamma(n)?)
        .scale(f64::from(m))
        * LogScaled::from_f64(i1_sum.value);

    // I₂: diagonal terms plus twice the strict upper triangle, exactly as the
    // double sum is printed; the (i, j) <-> (j, i) symmetry is asserted.
    let mut i2 = LogScaled::ZERO;
    for j in 0..m {
        for i in 0..=j {
            let a_ij = laguerre_pair_moment(i, j, dims, q)?;
            if i < j {
                let a_ji = laguerre_pair_moment(j, i, dims, q)?;
                let diff = (a_ij - a_ji).abs();
                if !diff.is_zero() && diff.log_mag() > a_ij.abs().log_mag() + (1e-10f64).ln() {
                    flags.push(format!(
                        "pair integral symmetry violated at (i, j) = ({i}, {j})"
                    ));
                }
            }
            let ln_weight = specfun::ln_gamma(f64::from(i) + 1.0)?
                + specfun::ln_gamma(f64::from(j) + 1.0)?
                - specfun::ln_gamma(f64::from(alpha + i) + 1.0)?
                - specfun::ln_gamma(f64::from(alpha + j) + 1.0)?;
            let multiplicity = if i == j { 1.0 } else { 2.0 };
            i2 = i2 + a_ij.square() * LogScaled::from_ln(ln_weight).scale(multiplicity);
        }
    }

    Ok(mean.square() + i1 - i2)
}

/// Fixed-trace conversion: `E_f[T^k]` from the first `k` induced moments
/// (entry 0 of `induced` must be 1). Refuses `q = 1`; the von Neumann branch
/// owns that limit.
pub fn convert_moment(k: u32, dims: Dims, q: f64, induced: &[LogScaled]) -> Result<f64> {
    if induced.len() != k as usize + 1 {
        return Err(Error::MomentCount {
            order: k,
            expected: k as usize + 1,
            got: induced.len(),
        });
    }
    if q == 1.0 {
        return Err(Error::NearVonNeumann {
            q,
            threshold: VON_NEUMANN_GUARD,
        });
    }
    EntropyOrder::new(q)?;
    if (induced[0] - LogScaled::ONE).abs().to_f64() > 1e-12 {
        return Err(Error::Domain {
            func: "convert_moment",
            value: induced[0].to_f64(),
            constraint: "induced[0] == 1",
        });
    }
    // m = 1 has the deterministic spectrum {1}: T is identically zero and the
    // bracket cancellation is exact, so short-circuit rather than round.
    if dims.m() == 1 {
        return Ok(0.0);
    }

    let mn = dims.mn() as f64;
    let ln_gamma_mn = specfun::ln_gamma(mn)?;
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for (i, moment) in induced.iter().enumerate() {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let coeff = specfun::gen_binomial(f64::from(k), i as u32);
        let ratio = LogScaled::from_ln(ln_gamma_mn - specfun::ln_gamma(mn + q * i as f64)?);
        let term = sign * coeff * (ratio * *moment).to_f64();
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    // the (q-1)^k division happens last, after the bracket is assembled
    Ok(sum / (q - 1.0).powi(k as i32))
}

/// Largest attainable Tsallis entropy for a spectrum of `m` eigenvalues:
/// `(m^{q-1} - 1)/((q-1) m^{q-1})`, reached by the maximally-entangled state.
/// Continuously extended to `ln m` at `q = 1`.
pub fn max_tsallis_entropy(m: u32, q: f64) -> f64 {
    let m = f64::from(m);
    if q == 1.0 {
        return m.ln();
    }
    let p = m.powf(q - 1.0);
    (p - 1.0) / ((q - 1.0) * p)
}

/// Closed forms for the quadratic entropy `q = 2`; exact rationals always
/// attach.
pub fn quadratic_report(dims: Dims) -> MomentReport {
    let exact = exact::quadratic_exact(dims);
    let m = f64::from(dims.m());
    let n = f64::from(dims.n());
    let mn = dims.mn() as f64;
    let e_l = LogScaled::from_f64(mn * (m + n));
    let e_l2 = LogScaled::from_f64(
        mn * (m * n.powi(3)
            + 2.0 * m * m * n * n
            + 4.0 * n * n
            + m.powi(3) * n
            + 10.0 * mn
            + 4.0 * m * m
            + 2.0),
    );
    MomentReport {
        dims,
        q: 2.0,
        e_l,
        e_l2,
        e_t: specfun::rational::to_f64(&exact.mean),
        e_t2: specfun::rational::to_f64(&exact.second_moment),
        var_t: specfun::rational::to_f64(&exact.variance),
        method: Method::Quadratic,
        cancellation_flags: Vec::new(),
        exact: Some(exact),
    }
}

/// `(E_g[L], E_g[L²])` from the explicit polynomial-in-`(n, q)` closed forms
/// for `m = 2` and `m = 3`.
pub fn small_m_induced(dims: Dims, q: f64) -> Result<(LogScaled, LogScaled)> {
    EntropyOrder::new(q)?;
    if q <= -0.5 {
        return Err(Error::Domain {
            func: "small_m_induced",
            value: q,
            constraint: "q > -1/2",
        });
    }
    let n = f64::from(dims.n());
    let ln_n1_fact = specfun::ln_gamma(n)?; // (n-1)!
    match dims.m() {
        2 => {
            let mean = LogScaled::from_f64(q * q + q + 2.0 * n - 2.0)
                * LogScaled::from_ln(specfun::ln_gamma(q + n - 1.0)? - ln_n1_fact);
            let ln_n2_fact = specfun::ln_gamma(n - 1.0).unwrap_or(0.0); // (n-2)!; n = 2 gives 0! = 1
            let first = LogScaled::from_ln(
                specfun::ln_gamma(q + n - 1.0)? + specfun::ln_gamma(q + n)? - ln_n2_fact,
            );
            let second_term = LogScaled::from_f64(2.0 * q * q + q + n - 1.0)
                * LogScaled::from_ln(specfun::ln_gamma(2.0 * q + n - 1.0)?);
            let second = (first + second_term) * LogScaled::from_ln(-ln_n1_fact).scale(2.0);
            Ok((mean, second))
        }
        3 => {
            let poly_mean = 6.0 * n * (q * q + q - 3.0)
                + (q - 2.0) * (q - 1.0) * (q + 2.0) * (q + 3.0)
                + 6.0 * n * n;
            let mean = LogScaled::from_f64(poly_mean / 2.0)
                * LogScaled::from_ln(specfun::ln_gamma(q + n - 2.0)? - ln_n1_fact);

            let q2 = q * q;
            let q3 = q2 * q;
            let q4 = q2 * q2;
            let poly_a =
                6.0 * n * (q2 + q - 3.0) + q4 + 4.0 * q3 - 7.0 * q2 - 10.0 * q + 12.0 + 6.0 * n * n;
            let ln_n2_fact = specfun::ln_gamma(n - 1.0)?; // (n-2)!; n >= 3 here
            let term_a = LogScaled::from_f64(poly_a)
                * LogScaled::from_ln(
                    specfun::ln_gamma(q + n - 2.0)? + specfun::ln_gamma(q + n - 1.0)?
                        - ln_n1_fact
                        - ln_n2_fact,
                );
            let poly_b =
                3.0 * n * (4.0 * q2 + 2.0 * q - 3.0) + 8.0 * q4 + 8.0 * q3 - 14.0 * q2 - 8.0 * q
                    + 6.0
                    + 3.0 * n * n;
            let term_b = LogScaled::from_f64(poly_b)
                * LogScaled::from_ln(specfun::ln_gamma(2.0 * q + n - 2.0)? - ln_n1_fact);
            Ok((mean, term_a + term_b))
        }
        m => Err(Error::Domain {
            func: "small_m_induced",
            value: f64::from(m),
            constraint: "m in {2, 3}",
        }),
    }
}

/// Full Tsallis moment report by the general path, with special-case
/// cross-checks, invariant flags, and (in [`Mode::Auto`]/[`Mode::Exact`])
/// the rational fast path. `q` must be in `(-1/2, inf) \ {0, 1}` and not
/// within [`VON_NEUMANN_GUARD`] of 1.
pub fn tsallis_variance(dims: Dims, q: f64) -> Result<MomentReport> {
    tsallis_report(dims, q, Mode::Auto)
}

pub(crate) fn tsallis_report(dims: Dims, q: f64, mode: Mode) -> Result<MomentReport> {
    EntropyOrder::new(q)?;
    if q == 1.0 || (q - 1.0).abs() < VON_NEUMANN_GUARD {
        return Err(Error::NearVonNeumann {
            q,
            threshold: VON_NEUMANN_GUARD,
        });
    }
    if q <= -0.5 {
        return Err(Error::Domain {
            func: "tsallis_variance",
            value: q,
            constraint: "q > -1/2",
        });
    }

    let mut flags = Vec::new();
    if q < 0.0 {
        flags.push("q in (-1/2, 0): outside the validated q > 0 range".to_string());
    }

    let e_l = induced_mean_flagged(dims, q, &mut flags)?;
    let e_l2 = induced_second_flagged(dims, q, &mut flags)?;
    let induced = [LogScaled::ONE, e_l, e_l2];
    let e_t = convert_moment(1, dims, q, &induced[..2])?;
    let e_t2 = convert_moment(2, dims, q, &induced)?;
    let var_t = e_t2 - e_t * e_t;

    let mut report = MomentReport {
        dims,
        q,
        e_l,
        e_l2,
        e_t,
        e_t2,
        var_t,
        method: Method::General,
        cancellation_flags: flags,
        exact: None,
    };

    // Special-case fast paths: adopted only after agreeing with the general
    // values just computed.
    if q == 2.0 {
        let quad = quadratic_report(dims);
        if close(quad.var_t, report.var_t, 1e-10) && close(quad.e_t, report.e_t, 1e-10) {
            report.e_t = quad.e_t;
            report.e_t2 = quad.e_t2;
            report.var_t = quad.var_t;
            report.method = Method::Quadratic;
        } else {
            report
                .cancellation_flags
                .push("quadratic fast path disagreed with general path; kept general".into());
        }
    } else if matches!(dims.m(), 2 | 3) {
        let (sm_l, sm_l2) = small_m_induced(dims, q)?;
        if close(sm_l.to_f64(), e_l.to_f64(), 1e-9) && close(sm_l2.to_f64(), e_l2.to_f64(), 1e-9) {
            let induced_sm = [LogScaled::ONE, sm_l, sm_l2];
            report.e_l = sm_l;
            report.e_l2 = sm_l2;
            report.e_t = convert_moment(1, dims, q, &induced_sm[..2])?;
            report.e_t2 = convert_moment(2, dims, q, &induced_sm)?;
            report.var_t = report.e_t2 - report.e_t * report.e_t;
            report.method = Method::SmallM;
        } else {
            report
                .cancellation_flags
                .push("small-m fast path disagreed with general path; kept general".into());
        }
    }

    match mode {
        Mode::Float => {}
        Mode::Auto | Mode::Exact => {
            if let Some(qi) = exact::availability(dims, q) {
                let exact = exact::tsallis_exact(dims, qi)?;
                let exact_var = specfun::rational::to_f64(&exact.variance);
                if !close(exact_var, report.var_t, 1e-11) {
                    report.cancellation_flags.push(format!(
                        "float variance {} deviates from exact {}",
                        report.var_t, exact_var
                    ));
                }
                // exact values are authoritative where they exist
                report.e_t = specfun::rational::to_f64(&exact.mean);
                report.e_t2 = specfun::rational::to_f64(&exact.second_moment);
                report.var_t = exact_var;
                report.exact = Some(exact);
            } else if mode == Mode::Exact {
                return Err(Error::ExactUnavailable { q, mn: dims.mn() });
            }
        }
    }

    for v in report.invariant_violations() {
        report.cancellation_flags.push(format!("invariant: {v}"));
    }
    Ok(report)
}

/// Report for the von Neumann branch (`q = 1`).
pub fn von_neumann_report(dims: Dims) -> MomentReport {
    let mean = von_neumann_mean(dims);
    let var = von_neumann_variance(dims);
    let mn = dims.mn() as f64;
    MomentReport {
        dims,
        q: 1.0,
        e_l: LogScaled::from_f64(mn),
        e_l2: LogScaled::from_f64(mn * (mn + 1.0)),
        e_t: mean,
        e_t2: var + mean * mean,
        var_t: var,
        method: Method::VonNeumann,
        cancellation_flags: Vec::new(),
        exact: None,
    }
}

/// Entry point used by the CLI and examples: routes `q = 1` to the von
/// Neumann branch and everything else to the Tsallis path.
pub fn report(dims: Dims, q: f64, mode: Mode) -> Result<MomentReport> {
    let order = EntropyOrder::new(q)?;
    if order.is_von_neumann() {
        if mode == Mode::Exact {
            return Err(Error::ExactUnavailable { q, mn: dims.mn() });
        }
        return Ok(von_neumann_report(dims));
    }
    tsallis_report(dims, q, mode)
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

fn note_cancellation(flags: &mut Vec<String>, what: &str, sum: &specfun::HypSum) {
    if sum.used_exact_fallback {
        flags.push(format!(
            "{what}: {:.1} digits cancelled; exact fallback used",
            sum.cancellation_log10
        ));
    } else if sum.cancellation_log10 > FLAG_DIGITS {
        flags.push(format!(
            "{what}: {:.1} digits cancelled",
            sum.cancellation_log10
        ));
    }
}

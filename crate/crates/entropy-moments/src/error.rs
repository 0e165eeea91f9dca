use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument left the mathematical domain of a function.
    #[error("{func}: argument {value} violates `{constraint}`")]
    Domain {
        func: &'static str,
        value: f64,
        constraint: &'static str,
    },

    /// Subsystem dimensions must satisfy 1 <= m <= n.
    #[error("invalid dimensions (m = {m}, n = {n}): require 1 <= m <= n")]
    InvalidDims { m: u32, n: u32 },

    /// The entropy order q is outside the supported range.
    #[error("invalid entropy order q = {q}: {reason}")]
    InvalidOrder { q: f64, reason: &'static str },

    /// Direct Tsallis evaluation refused near q = 1 where the moment
    /// conversion loses all significance; use the von Neumann branch or the
    /// q -> 1 limit extrapolation instead.
    #[error(
        "q = {q} is within {threshold} of 1: the (q-1)^k division is \
         catastrophically ill-conditioned; use the von Neumann branch or the \
         q -> 1 limit extrapolation"
    )]
    NearVonNeumann { q: f64, threshold: f64 },

    /// A lower Pochhammer factor of a terminating hypergeometric sum hit
    /// zero before the series terminated.
    #[error("hypergeometric denominator Pochhammer ({b} + {k}) vanished before termination")]
    DenominatorPole { b: f64, k: u32 },

    /// The first upper parameter of a terminating hypergeometric sum must be
    /// a non-positive integer.
    #[error("hypergeometric parameter a1 = {a1} is not a non-positive integer")]
    NotTerminating { a1: f64 },

    /// Wrong number of induced-entropy moments supplied to the fixed-trace
    /// conversion.
    #[error("moment conversion of order {order} needs {expected} induced moments, got {got}")]
    MomentCount {
        order: u32,
        expected: usize,
        got: usize,
    },

    /// The Jacobi eigensolver failed to reach the off-diagonal threshold.
    #[error("Hermitian Jacobi eigensolver did not converge after {sweeps} sweeps")]
    EigenNonConvergence { sweeps: usize },

    /// A sampled matrix produced an eigenvalue too negative to be rounding.
    #[error("sampled eigenvalue {value} below clipping floor; eigensolver failure suspected")]
    NegativeEigenvalue { value: f64 },

    /// Negative-order Tsallis entropy of a spectrum containing a zero.
    #[error("Tsallis entropy with q = {q} < 0 diverges on a zero eigenvalue")]
    ZeroEigenvalueNegativeOrder { q: f64 },

    /// Too many Monte Carlo samples were discarded to trust the estimate.
    #[error("{discarded} of {total} Monte Carlo samples discarded (> 0.01%)")]
    TooManyDiscards { discarded: u64, total: u64 },

    /// Monte Carlo sample budget below the supported minimum.
    #[error("Monte Carlo runs need at least {min} samples, got {got}")]
    TooFewSamples { min: u64, got: u64 },

    /// Exact (rational) evaluation was requested where it is not defined.
    #[error("exact mode requires integer q >= 2 with m*n + 2q <= 200 (got q = {q}, m*n = {mn})")]
    ExactUnavailable { q: f64, mn: u64 },

    /// Configuration error surfaced by the command-line layer.
    #[error("{0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

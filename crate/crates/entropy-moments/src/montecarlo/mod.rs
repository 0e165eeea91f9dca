//! Empirical oracle: direct sampling of the fixed-trace ensemble.
//!
//! A Haar-random pure state's entanglement spectrum is the eigenvalue vector
//! of `Y Y† / tr(Y Y†)` for a complex Ginibre `Y`. Sampling that and
//! accumulating entropy statistics gives a closed-form-free estimate of every
//! moment this crate computes, with quantified standard errors.
//!
//! Reproducibility contract: a run is a pure function of
//! `(dims, q, samples, seed, workers)`. Worker `w` draws from the
//! counter-based substream `(seed, w)` and owns a fixed contiguous range of
//! the sample budget; accumulators merge in worker order, so results are
//! bit-identical across repeats and thread schedules.

pub mod eigen;
pub mod rng;
pub mod welford;

use crate::error::{Error, Result};
use crate::laguerre::Dims;
use num_complex::Complex64;
use rng::SubStream;
use serde::Serialize;
use welford::CentralMoments;

/// An `m x n` matrix of i.i.d. standard complex Gaussians (`E[|x|²] = 1`).
#[derive(Debug, Clone)]
pub struct GinibreMatrix {
    pub dims: Dims,
    /// Row-major `m x n`.
    pub entries: Vec<Complex64>,
}

impl GinibreMatrix {
    pub fn sample(dims: Dims, stream: &mut SubStream) -> Self {
        let entries = (0..dims.m() as usize * dims.n() as usize)
            .map(|_| stream.standard_complex_normal())
            .collect();
        GinibreMatrix { dims, entries }
    }

    /// `Y Y†`, the `m x m` Hermitian Gram matrix, row-major.
    pub fn gram(&self) -> Vec<Complex64> {
        let m = self.dims.m() as usize;
        let n = self.dims.n() as usize;
        let mut a = vec![Complex64::new(0.0, 0.0); m * m];
        for i in 0..m {
            for j in i..m {
                let mut z = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    z += self.entries[i * n + k] * self.entries[j * n + k].conj();
                }
                a[i * m + j] = z;
                a[j * m + i] = z.conj();
            }
        }
        a
    }
}

/// Normalized entanglement spectrum: `m` eigenvalues, sorted descending,
/// non-negative, summing to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    /// Wraps a raw eigenvalue vector of `Y Y†`: values are normalized by
    /// their sum, clipped at `-1e-12` (anything more negative indicates an
    /// eigensolver failure and rejects the sample), and sorted descending.
    pub fn from_raw_eigenvalues(mut values: Vec<f64>) -> Result<Self> {
        let trace: f64 = values.iter().sum();
        for v in &mut values {
            *v /= trace;
            if *v < -1e-12 {
                return Err(Error::NegativeEigenvalue { value: *v });
            }
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        let sum: f64 = values.iter().sum();
        for v in &mut values {
            *v /= sum;
        }
        values.sort_by(|a, b| b.total_cmp(a));
        Ok(Spectrum { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Draws one entanglement spectrum: eigenvalues of `Y Y† / tr(Y Y†)`.
pub fn sample_spectrum(dims: Dims, stream: &mut SubStream) -> Result<Spectrum> {
    let y = GinibreMatrix::sample(dims, stream);
    spectrum_of(&y)
}

/// The spectrum of a given Ginibre draw (exposed so scale-invariance and
/// solver-reconstruction checks can reuse the same matrix).
pub fn spectrum_of(y: &GinibreMatrix) -> Result<Spectrum> {
    if y.dims.m() == 1 {
        return Ok(Spectrum { values: vec![1.0] });
    }
    let gram = y.gram();
    let eig = eigen::hermitian_eigen(&gram, y.dims.m() as usize, false)?;
    Spectrum::from_raw_eigenvalues(eig.values)
}

/// Tsallis entropy `T = (1 - Σ λᵢ^q)/(q - 1)` of a spectrum.
///
/// `0^q ≡ 0` for `q > 0`; for `q < 0` a zero eigenvalue makes `λ^q` diverge
/// and is an error.
pub fn tsallis_of(spectrum: &Spectrum, q: f64) -> Result<f64> {
    if q == 0.0 || q == 1.0 {
        return Err(Error::InvalidOrder {
            q,
            reason: "Tsallis entropy needs q != 0, 1 (q = 1 is the von Neumann branch)",
        });
    }
    let mut sum = 0.0;
    for &l in &spectrum.values {
        if l < 1e-300 {
            if q < 0.0 {
                return Err(Error::ZeroEigenvalueNegativeOrder { q });
            }
            continue; // 0^q = 0 for q > 0
        }
        sum += l.powf(q);
    }
    Ok((1.0 - sum) / (q - 1.0))
}

/// von Neumann entropy `S = -Σ λᵢ ln λᵢ`, with `0 ln 0 ≡ 0`.
pub fn von_neumann_of(spectrum: &Spectrum) -> f64 {
    spectrum
        .values
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| -l * l.ln())
        .sum()
}

/// Monte Carlo estimate of the mean and variance of an entropy functional.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub variance: f64,
    pub se_mean: f64,
    pub se_variance: f64,
    /// Accepted samples contributing to the estimate.
    pub samples: u64,
    pub seed: u64,
    pub q: f64,
    pub workers: u64,
    /// Samples rejected by the `q < 0` zero-eigenvalue policy.
    pub rejected: u64,
    /// Samples discarded for solver failure.
    pub discarded: u64,
    pub flags: Vec<String>,
}

/// Smallest sample budget accepted.
pub const MIN_SAMPLES: u64 = 10_000;

/// Fraction of bad samples beyond which a run aborts (discards) or is
/// flagged conditional (rejections).
const BAD_SAMPLE_FRACTION: f64 = 1e-4;

/// Runs the sampler. `q = 1` estimates von Neumann entropy moments; any
/// other valid `q` the Tsallis moments.
pub fn run_mc(dims: Dims, q: f64, samples: u64, seed: u64, workers: u64) -> Result<McEstimate> {
    crate::moments::EntropyOrder::new(q)?;
    if samples < MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            min: MIN_SAMPLES,
            got: samples,
        });
    }
    if workers == 0 {
        return Err(Error::Config("worker count must be >= 1".into()));
    }

    struct WorkerOutcome {
        acc: CentralMoments,
        rejected: u64,
        discarded: u64,
        error: Option<Error>,
    }

    let run_worker = |w: u64, count: u64| -> WorkerOutcome {
        let mut stream = SubStream::new(seed, w);
        let mut acc = CentralMoments::new();
        let mut rejected = 0;
        let mut discarded = 0;
        let mut error = None;
        for _ in 0..count {
            let spectrum = match sample_spectrum(dims, &mut stream) {
                Ok(s) => s,
                Err(Error::EigenNonConvergence { .. }) | Err(Error::NegativeEigenvalue { .. }) => {
                    discarded += 1;
                    continue;
                }
                Err(e) => {
                    error = Some(e);
                    break;
                }
            };
            let value = if q == 1.0 {
                von_neumann_of(&spectrum)
            } else if q < 0.0 && spectrum.values().last().is_some_and(|&l| l < 1e-12) {
                // λ^q is integrable for q > -1 but numerically explosive at
                // the origin; count and skip, flagging bias risk later
                rejected += 1;
                continue;
            } else {
                match tsallis_of(&spectrum, q) {
                    Ok(v) => v,
                    Err(e) => {
                        error = Some(e);
                        break;
                    }
                }
            };
            acc.push(value);
        }
        WorkerOutcome {
            acc,
            rejected,
            discarded,
            error,
        }
    };

    // contiguous ranges: worker w gets samples/workers, the first
    // samples % workers each take one extra
    let base = samples / workers;
    let extra = samples % workers;
    let counts: Vec<u64> = (0..workers).map(|w| base + u64::from(w < extra)).collect();

    let outcomes: Vec<WorkerOutcome> = if workers == 1 {
        vec![run_worker(0, counts[0])]
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = counts
                .iter()
                .enumerate()
                .map(|(w, &count)| scope.spawn(move || run_worker(w as u64, count)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("worker panicked"))
                .collect()
        })
    };

    // merge in worker order for bit-determinism
    let mut acc = CentralMoments::new();
    let mut rejected = 0;
    let mut discarded = 0;
    for outcome in outcomes {
        if let Some(e) = outcome.error {
            return Err(e);
        }
        acc.merge(&outcome.acc);
        rejected += outcome.rejected;
        discarded += outcome.discarded;
    }

    if (discarded as f64) > BAD_SAMPLE_FRACTION * samples as f64 {
        return Err(Error::TooManyDiscards {
            discarded,
            total: samples,
        });
    }
    let mut flags = Vec::new();
    if (rejected as f64) > BAD_SAMPLE_FRACTION * samples as f64 {
        flags.push(format!(
            "conditional estimate: {rejected} samples rejected near zero eigenvalues"
        ));
    }

    Ok(McEstimate {
        mean: acc.mean(),
        variance: acc.variance(),
        se_mean: acc.se_mean(),
        se_variance: acc.se_variance(),
        samples: acc.count(),
        seed,
        q,
        workers,
        rejected,
        discarded,
        flags,
    })
}

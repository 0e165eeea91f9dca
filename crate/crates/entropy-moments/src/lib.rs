//! Exact moments of entanglement entropy for bipartite random pure states.
//!
//! A composite quantum system `A ⊗ B` with subsystem dimensions `m <= n` in a
//! Haar-random pure state has reduced-density-matrix eigenvalues distributed
//! by the fixed-trace Laguerre unitary ensemble. This crate computes the
//! first two moments (hence the variance) of the Tsallis entropy
//! `T = (1 - Σ λᵢ^q) / (q - 1)` and of its `q -> 1` limit, the von Neumann
//! entropy `S = -Σ λᵢ ln λᵢ`, in closed form, and cross-verifies every closed
//! form against independent oracles:
//!
//! * Gauss-Laguerre quadrature of the correlation-kernel integrals,
//! * exact rational arithmetic for integer `q`,
//! * Monte Carlo sampling of the ensemble itself.
//!
//! # Modules
//!
//! * [`specfun`] — gamma family, generalized binomials, terminating `₃F₂`
//!   sums (float with cancellation tracking, plus an exact rational backend).
//! * [`laguerre`] — Laguerre polynomials, the correlation kernel, the
//!   one-point density, and the Schrödinger integral that closes
//!   `∫ x^q e^{-x} L_s L_t dx`.
//! * [`quadrature`] — Golub-Welsch Gauss-Laguerre rules and the integral
//!   oracles for the induced moments.
//! * [`moments`] — the closed-form moment formulas, special cases, the von
//!   Neumann branch, and the `q -> 1` limit check.
//! * [`montecarlo`] — reproducible sampling of the ensemble with streaming
//!   moment accumulation.
//! * [`cli`] — the `moments` / `verify` / `sweep` command-line front end.
//!
//! # Quick example
//!
//! ```
//! use entropy_moments::laguerre::Dims;
//! use entropy_moments::moments;
//!
//! let dims = Dims::new(2, 2).unwrap();
//! let report = moments::report(dims, 2.0, moments::Mode::Auto).unwrap();
//! assert!((report.e_t - 0.2).abs() < 1e-14);          // E[T]   = 1/5
//! assert!((report.var_t - 3.0 / 175.0).abs() < 1e-14); // V[T]  = 3/175
//! ```
//!
//! The `examples/` directory has one runnable program per capability; start
//! with `cargo run --example compute_moments`.

pub mod cli;
pub mod error;
pub mod laguerre;
pub mod moments;
pub mod montecarlo;
pub mod quadrature;
pub mod specfun;

pub use error::{Error, Result};

//! Monte Carlo concordance: sample the fixed-trace ensemble directly and
//! compare the empirical entropy moments against the closed forms, in units
//! of the estimator's standard error.
//!
//! ```bash
//! cargo run --release --example monte_carlo_check
//! cargo run --release --example monte_carlo_check -- 2 3 2 1000000 42 4
//! ```
//!
//! Arguments: `m n q [samples] [seed] [workers]`.

use entropy_moments::laguerre::Dims;
use entropy_moments::moments::{self, Mode};
use entropy_moments::montecarlo;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let m: u32 = args.first().map_or(Ok(2), |s| s.parse())?;
    let n: u32 = args.get(1).map_or(Ok(2), |s| s.parse())?;
    let q: f64 = args.get(2).map_or(Ok(2.0), |s| s.parse())?;
    let samples: u64 = args.get(3).map_or(Ok(500_000), |s| s.parse())?;
    let seed: u64 = args.get(4).map_or(Ok(42), |s| s.parse())?;
    let workers: u64 = args.get(5).map_or(Ok(4), |s| s.parse())?;

    let dims = Dims::new(m, n)?;
    let analytic = moments::report(dims, q, Mode::Auto)?;
    let est = montecarlo::run_mc(dims, q, samples, seed, workers)?;

    println!("dims {dims}, q = {q}, {samples} samples, seed {seed}, {workers} workers");
    println!("  accepted samples : {}", est.samples);
    println!(
        "  mean     : mc {:.8} +- {:.2e}   analytic {:.8}   ({:.2} se)",
        est.mean,
        est.se_mean,
        analytic.e_t,
        (est.mean - analytic.e_t).abs() / est.se_mean.max(1e-300)
    );
    println!(
        "  variance : mc {:.8} +- {:.2e}   analytic {:.8}   ({:.2} se)",
        est.variance,
        est.se_variance,
        analytic.var_t,
        (est.variance - analytic.var_t).abs() / est.se_variance.max(1e-300)
    );
    for flag in &est.flags {
        println!("  note: {flag}");
    }
    println!("\nre-running with the same seed and worker count is bit-identical:");
    let rerun = montecarlo::run_mc(dims, q, samples, seed, workers)?;
    println!("  identical = {}", rerun == est);
    Ok(())
}

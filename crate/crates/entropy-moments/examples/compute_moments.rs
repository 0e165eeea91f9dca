//! Compute the exact mean, second moment, and variance of the entanglement
//! entropy for one `(m, n, q)` cell.
//!
//! ```bash
//! cargo run --example compute_moments            # defaults (3, 4, 1.5)
//! cargo run --example compute_moments -- 2 2 2   # m n q
//! cargo run --example compute_moments -- 2 2 1   # q = 1: von Neumann
//! ```

use entropy_moments::laguerre::Dims;
use entropy_moments::moments::{self, Mode};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let m: u32 = args.first().map_or(Ok(3), |s| s.parse())?;
    let n: u32 = args.get(1).map_or(Ok(4), |s| s.parse())?;
    let q: f64 = args.get(2).map_or(Ok(1.5), |s| s.parse())?;

    let dims = Dims::new(m, n)?;
    let report = moments::report(dims, q, Mode::Auto)?;

    println!("bipartite system {dims}, entropy order q = {q}");
    println!("  method                 : {}", report.method);
    println!("  induced mean   E_g[L]  : {:.15e}", report.e_l.to_f64());
    println!("  induced second E_g[L2] : {:.15e}", report.e_l2.to_f64());
    println!("  entropy mean   E[T]    : {:.15}", report.e_t);
    println!("  second moment  E[T2]   : {:.15}", report.e_t2);
    println!("  variance       V[T]    : {:.15}", report.var_t);
    println!(
        "  max entropy (maximally entangled): {:.15}",
        moments::max_tsallis_entropy(m, q)
    );
    if let Some(exact) = &report.exact {
        use entropy_moments::specfun::rational::render;
        println!(
            "  exact rationals        : mean = {}, variance = {}",
            render(&exact.mean),
            render(&exact.variance)
        );
    }
    for flag in &report.cancellation_flags {
        println!("  note: {flag}");
    }
    Ok(())
}

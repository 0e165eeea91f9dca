//! Verify the closed-form induced moments against Gauss-Laguerre quadrature
//! of the correlation-kernel integrals — two fully independent routes to the
//! same numbers.
//!
//! ```bash
//! cargo run --example quadrature_cross_check
//! ```

use entropy_moments::laguerre::Dims;
use entropy_moments::moments;
use entropy_moments::quadrature;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!(
        "{:>6} {:>5} {:>18} {:>18} {:>10}",
        "dims", "q", "E_g[L] closed", "E_g[L] quadrature", "rel err"
    );
    let mut worst = 0.0f64;
    for (m, n) in [(2u32, 3u32), (3, 5), (2, 7), (3, 8)] {
        let dims = Dims::new(m, n)?;
        for q in [0.5, 1.5, 2.0, 2.5, 3.0] {
            let closed = moments::induced_mean(dims, q)?.to_f64();
            let quad = quadrature::induced_moment_oracle(dims, q)?;
            let rel = (closed - quad).abs() / quad.abs();
            worst = worst.max(rel);
            println!(
                "{:>6} {:>5} {:>18.12} {:>18.12} {:>10.2e}",
                format!("{m},{n}"),
                q,
                closed,
                quad,
                rel
            );
        }
    }

    println!("\nsecond moment assembly E_g[L^2] = I1 - I2 + E_g[L]^2:");
    for (m, n, q) in [(2u32, 2u32, 2.0), (3, 5, 2.5), (2, 4, 0.5)] {
        let dims = Dims::new(m, n)?;
        let closed = moments::induced_second(dims, q)?.to_f64();
        let quad = quadrature::induced_second_moment_oracle(dims, q)?;
        let rel = (closed - quad).abs() / quad.abs();
        worst = worst.max(rel);
        println!("  dims ({m},{n}) q = {q}: closed {closed:.12e} vs quadrature {quad:.12e} (rel {rel:.2e})");
    }
    println!("\nworst relative error: {worst:.2e}");
    Ok(())
}

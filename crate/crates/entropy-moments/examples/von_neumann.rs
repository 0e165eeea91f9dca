//! The von Neumann branch (`q -> 1`): mean and variance from the digamma /
//! trigamma formulas, with the variance independently reproduced through the
//! limit of the Tsallis moment conversion.
//!
//! ```bash
//! cargo run --example von_neumann
//! ```

use entropy_moments::laguerre::Dims;
use entropy_moments::moments;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!(
        "{:>6} {:>12} {:>12} {:>14} {:>12}",
        "dims", "mean E[S]", "var (direct)", "var (chain)", "agree"
    );
    let mut worst = 0.0f64;
    for m in 1..=6u32 {
        for n in m..=8 {
            let dims = Dims::new(m, n)?;
            let mean = moments::von_neumann_mean(dims);
            let direct = moments::von_neumann_variance(dims);
            let chain = moments::von_neumann_variance_via_moment_chain(dims);
            let rel = (direct - chain).abs() / direct.abs().max(1e-300);
            if m > 1 {
                worst = worst.max(rel);
            }
            println!(
                "{:>6} {:>12.8} {:>12.9} {:>14.9} {:>12.2e}",
                format!("{m},{n}"),
                mean,
                direct,
                chain,
                rel
            );
        }
    }
    println!("\nworst relative disagreement of the two routes (m >= 2): {worst:.2e}");
    println!(
        "mean is bounded by ln m: e.g. E[S](2,1000) = {:.6} vs ln 2 = {:.6}",
        moments::von_neumann_mean(Dims::new(2, 1000)?),
        std::f64::consts::LN_2
    );
    Ok(())
}

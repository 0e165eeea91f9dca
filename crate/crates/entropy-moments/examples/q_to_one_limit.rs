//! The `q -> 1` continuity check: Richardson-extrapolate the Tsallis
//! variance toward `q = 1` and compare with the von Neumann variance the
//! limit must reproduce.
//!
//! ```bash
//! cargo run --example q_to_one_limit
//! ```

use entropy_moments::laguerre::Dims;
use entropy_moments::moments;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!(
        "{:>6} {:>16} {:>16} {:>10}",
        "dims", "extrapolated", "von Neumann", "abs err"
    );
    for (m, n) in [(2u32, 2u32), (2, 3), (3, 4), (4, 6), (6, 6)] {
        let dims = Dims::new(m, n)?;
        let lim = moments::tsallis_variance_q1_limit(dims, 1e-3)?;
        let vn = moments::von_neumann_variance(dims);
        println!(
            "{:>6} {:>16.12} {:>16.12} {:>10.2e}",
            format!("{m},{n}"),
            lim,
            vn,
            (lim - vn).abs()
        );
    }

    // the raw Tsallis variance approaching q = 1 from both sides
    let dims = Dims::new(2, 2)?;
    println!("\nraw variance near q = 1 at dims {dims}:");
    for q in [0.9, 0.99, 0.995, 1.005, 1.01, 1.1] {
        let var = moments::tsallis_variance(dims, q)?.var_t;
        println!("  q = {q:<6}: V[T] = {var:.10}");
    }
    println!("  (|q - 1| < 1e-3 is refused: the conversion is ill-conditioned there)");
    Ok(())
}

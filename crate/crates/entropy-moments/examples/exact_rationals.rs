//! Exact arithmetic for integer entropy orders: every moment is a ratio of
//! big integers, no rounding anywhere, and the float path is validated
//! against it.
//!
//! ```bash
//! cargo run --example exact_rationals
//! ```

use entropy_moments::laguerre::Dims;
use entropy_moments::moments::exact;
use entropy_moments::specfun::rational::{render, to_f64};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dims = Dims::new(3, 4)?;
    println!("dims {dims}:");
    for q in 2..=5u32 {
        let e = exact::tsallis_exact(dims, q)?;
        println!("  q = {q}");
        println!(
            "    E[T]  = {:<30} ~= {:.12}",
            render(&e.mean),
            to_f64(&e.mean)
        );
        println!(
            "    E[T2] = {:<30} ~= {:.12}",
            render(&e.second_moment),
            to_f64(&e.second_moment)
        );
        println!(
            "    V[T]  = {:<30} ~= {:.12}",
            render(&e.variance),
            to_f64(&e.variance)
        );
    }

    // induced Laguerre moments are plain integers at integer q
    println!("\ninduced moments at q = 3 (integers):");
    for (m, n) in [(2u32, 2u32), (2, 5), (3, 4)] {
        let d = Dims::new(m, n)?;
        println!(
            "  dims {d}: E_g[L] = {}, E_g[L^2] = {}",
            render(&exact::induced_mean_exact(d, 3)?),
            render(&exact::induced_second_exact(d, 3)?),
        );
    }
    Ok(())
}

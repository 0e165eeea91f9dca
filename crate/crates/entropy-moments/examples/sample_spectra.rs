//! Draw entanglement spectra from the fixed-trace ensemble and inspect the
//! raw material behind the Monte Carlo oracle: normalization, ordering, the
//! invariance under the Gaussian scale convention, and the eigensolver's
//! reconstruction quality.
//!
//! ```bash
//! cargo run --example sample_spectra
//! ```

use entropy_moments::laguerre::Dims;
use entropy_moments::montecarlo::{self, eigen, rng::SubStream, GinibreMatrix};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dims = Dims::new(3, 5)?;
    let mut stream = SubStream::new(42, 0);

    println!("five spectra from dims {dims} (sorted, sum = 1):");
    for i in 0..5 {
        let s = montecarlo::sample_spectrum(dims, &mut stream)?;
        let sum: f64 = s.values().iter().sum();
        println!("  #{i}: {:?}  (sum - 1 = {:+.1e})", s.values(), sum - 1.0);
    }

    // scale invariance: the normalization removes the entry-variance choice
    let y = GinibreMatrix::sample(dims, &mut stream);
    let mut y_scaled = y.clone();
    for z in &mut y_scaled.entries {
        *z *= 2.0;
    }
    let s1 = montecarlo::spectrum_of(&y)?;
    let s2 = montecarlo::spectrum_of(&y_scaled)?;
    let max_diff = s1
        .values()
        .iter()
        .zip(s2.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    println!("\nscaling Y by 2 changes the spectrum by at most {max_diff:.1e}");

    // eigensolver reconstruction: Q Λ Q† vs the Gram matrix
    let gram = y.gram();
    let e = eigen::hermitian_eigen(&gram, 3, true)?;
    let v = e.vectors.as_ref().unwrap();
    let mut residual = 0.0f64;
    let mut scale = 0.0f64;
    for r in 0..3 {
        for c in 0..3 {
            let mut z = num_complex::Complex64::new(0.0, 0.0);
            for k in 0..3 {
                z += v[r * 3 + k] * e.values[k] * v[c * 3 + k].conj();
            }
            residual += (z - gram[r * 3 + c]).norm_sqr();
            scale += gram[r * 3 + c].norm_sqr();
        }
    }
    println!(
        "eigensolver reconstruction residual (Frobenius, relative): {:.1e}",
        (residual / scale).sqrt()
    );

    // entropies of hand-built spectra
    let s = montecarlo::sample_spectrum(dims, &mut stream)?;
    println!(
        "\nentropies of the last spectrum: T(q=2) = {:.6}, S = {:.6}",
        montecarlo::tsallis_of(&s, 2.0)?,
        montecarlo::von_neumann_of(&s)
    );
    Ok(())
}

//! Produce the machine-readable sweep table through the library layer —
//! the same rows `entropy-moments sweep` emits.
//!
//! ```bash
//! cargo run --example sweep_table > sweep.csv
//! ```

use entropy_moments::cli;

fn main() {
    let mut out = std::io::stdout().lock();
    let code = cli::run(
        [
            "entropy-moments",
            "sweep",
            "--m",
            "2..3",
            "--n",
            "2..6",
            "--q",
            "0.5,1,2,3",
            "--format",
            "csv",
        ],
        &mut out,
    );
    std::process::exit(code);
}

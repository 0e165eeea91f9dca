use std::io::Write;

fn main() {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let code = entropy_moments::cli::run(std::env::args(), &mut out);
    let _ = out.flush();
    std::process::exit(code);
}

use std::io::Write;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let out = selfsim::cli::run(&args);
    // a closed pipe (`selfsim … | head`) is not an error
    let _ = std::io::stdout().lock().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().lock().write_all(out.stderr.as_bytes());
    std::process::exit(out.code);
}

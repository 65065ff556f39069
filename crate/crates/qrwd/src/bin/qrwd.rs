//! `qrwd <command> [--config path] [--key value …]`

fn main() {
    if let Some(n) = std::env::var("QRWD_THREADS").ok().and_then(|v| v.parse::<usize>().ok()).filter(|&n| n > 0) {
        // only fails if a pool already exists, which cannot happen this early
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let args: Vec<String> = std::env::args().skip(1).collect();
    std::process::exit(qrwd::io::run_command(&args));
}

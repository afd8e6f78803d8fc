use std::io::Write;

fn main() {
    let env_cache = std::env::var_os(knotpi::cli::CACHE_ENV)
        .filter(|v| !v.is_empty())
        .map(std::path::PathBuf::from);
    let out = knotpi::cli::run(std::env::args_os(), env_cache);
    let _ = std::io::stdout().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().write_all(out.stderr.as_bytes());
    std::process::exit(out.code);
}

fn main() {
    std::process::exit(tautring::cli::run(std::env::args_os()));
}

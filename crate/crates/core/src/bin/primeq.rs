fn main() {
    std::process::exit(primeq::cli::run(std::env::args_os()));
}

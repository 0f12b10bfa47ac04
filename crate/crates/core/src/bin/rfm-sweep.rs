fn main() {
    std::process::exit(rfm::cli::run_cli(std::env::args_os()));
}

fn main() {
    std::process::exit(quickim::cli::run(std::env::args_os()));
}

fn main() {
    std::process::exit(luinv::cli::main_with_args(std::env::args().collect()));
}

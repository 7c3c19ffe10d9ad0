fn main() {
    std::process::exit(lipkit::cli::main_with_args(std::env::args()));
}

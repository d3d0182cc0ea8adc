fn main() {
    std::process::exit(latgp::cli::run());
}

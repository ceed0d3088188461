fn main() {
    std::process::exit(degennes::cli::run());
}

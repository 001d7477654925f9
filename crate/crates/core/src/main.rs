fn main() {
    std::process::exit(intlog::cli::run());
}

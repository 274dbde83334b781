fn main() {
    std::process::exit(volatile_memristor::cli::run());
}

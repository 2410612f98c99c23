fn main() {
    std::process::exit(noosphere_service::cli::main());
}

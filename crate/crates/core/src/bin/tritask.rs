fn main() {
    std::process::exit(tritask::cli::main());
}

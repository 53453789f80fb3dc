fn main() {
    std::process::exit(tdpareto::cli::main());
}

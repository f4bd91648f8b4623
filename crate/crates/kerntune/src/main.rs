fn main() {
    std::process::exit(kerntune::cli::main());
}

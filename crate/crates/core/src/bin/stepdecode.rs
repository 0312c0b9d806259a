fn main() {
    std::process::exit(stepdecode::cli::cli_main());
}

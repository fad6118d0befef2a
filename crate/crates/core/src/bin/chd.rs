fn main() {
    std::process::exit(cartan_hartogs::cli::run_cli(std::env::args_os()));
}

fn main() {
    std::process::exit(dgbo::cli_io::run_cli(std::env::args_os()));
}

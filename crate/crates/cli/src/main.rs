fn main() {
    std::process::exit(qcopula_cli::main_with_args(std::env::args_os()));
}

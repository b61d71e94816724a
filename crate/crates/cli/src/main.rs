fn main() {
    std::process::exit(armax_cli::main_with_args(std::env::args_os()));
}

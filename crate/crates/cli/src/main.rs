fn main() {
    std::process::exit(calper_cli::args::main_with_args(std::env::args_os()));
}

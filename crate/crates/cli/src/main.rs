fn main() {
    std::process::exit(ntoda_cli::main_with_args(std::env::args_os()));
}

fn main() {
    std::process::exit(hadamard::cli::main_with_args(std::env::args_os()));
}

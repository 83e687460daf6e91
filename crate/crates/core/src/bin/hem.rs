fn main() {
    std::process::exit(hem_core::cli::main_with_args(std::env::args_os()));
}

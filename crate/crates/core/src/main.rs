fn main() {
    std::process::exit(dilated_core::cli::main_with_args(std::env::args_os()));
}

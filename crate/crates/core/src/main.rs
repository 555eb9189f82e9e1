fn main() {
    std::process::exit(fintriple::cli::main_with_args(std::env::args_os()));
}

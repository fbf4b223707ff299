fn main() {
    std::process::exit(hbcs::cli::main_with_args(std::env::args_os()));
}

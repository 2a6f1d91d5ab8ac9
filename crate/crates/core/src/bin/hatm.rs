fn main() {
    std::process::exit(hatm::cli::main_with_args(std::env::args_os()));
}

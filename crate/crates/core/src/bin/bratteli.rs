fn main() {
    std::process::exit(bratteli::cli::main_with_args(std::env::args_os()));
}

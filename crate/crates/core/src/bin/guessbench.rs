fn main() {
    std::process::exit(guessbench::cli::main_with_args(std::env::args_os()));
}

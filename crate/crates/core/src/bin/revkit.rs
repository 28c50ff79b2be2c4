fn main() {
    std::process::exit(revkit::cli::main_with_args(std::env::args_os()));
}

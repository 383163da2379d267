fn main() {
    std::process::exit(strandfield::cli::main_with_args(std::env::args_os()));
}

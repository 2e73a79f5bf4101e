fn main() {
    std::process::exit(csmpose::cli::main_with_args(std::env::args_os()));
}

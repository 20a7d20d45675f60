fn main() {
    std::process::exit(kincoerce::cli::main_with_args(std::env::args_os()));
}

fn main() {
    std::process::exit(nonlocal_robin::cli::main_with_args(std::env::args_os()));
}

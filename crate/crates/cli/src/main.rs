fn main() {
    std::process::exit(schottky_cli::main_with_args(std::env::args_os()));
}

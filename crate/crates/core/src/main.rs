fn main() {
    std::process::exit(fibretorsion::cli::main_with_args(std::env::args_os()));
}

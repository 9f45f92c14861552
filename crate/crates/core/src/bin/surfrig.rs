fn main() {
    std::process::exit(surface_rigidity::cli::main_with_args(std::env::args_os()));
}

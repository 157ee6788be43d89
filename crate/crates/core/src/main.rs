fn main() {
    std::process::exit(inertial_moreau::cli::main_with_args(std::env::args_os()));
}

fn main() {
    std::process::exit(rdomsim_cli::cli::main_with(std::env::args_os()));
}

fn main() {
    std::process::exit(choquard_lab::cli::main_with(std::env::args_os()));
}

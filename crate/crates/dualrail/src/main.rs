fn main() {
    std::process::exit(dualrail::cli::main_with(std::env::args_os()));
}

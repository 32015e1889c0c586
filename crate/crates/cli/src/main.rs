fn main() {
    std::process::exit(derham_cli::run(std::env::args_os()));
}

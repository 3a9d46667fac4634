fn main() {
    std::process::exit(hypspec_cli::run(std::env::args_os()));
}

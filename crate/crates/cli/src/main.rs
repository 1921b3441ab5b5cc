fn main() {
    std::process::exit(yeh_cli::run_from(std::env::args_os()));
}

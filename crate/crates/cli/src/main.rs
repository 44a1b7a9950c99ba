fn main() {
    std::process::exit(leocov_cli::run(std::env::args_os()));
}

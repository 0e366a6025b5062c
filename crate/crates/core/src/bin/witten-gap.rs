fn main() {
    std::process::exit(witten_gap::cli::run(std::env::args_os()));
}

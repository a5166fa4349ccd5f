fn main() {
    std::process::exit(locframe::cli::run(std::env::args_os()));
}

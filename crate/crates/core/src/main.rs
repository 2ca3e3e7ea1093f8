fn main() {
    std::process::exit(gridopt::cli::run(std::env::args_os()));
}

fn main() {
    std::process::exit(trackmine::cli::run(std::env::args_os()));
}

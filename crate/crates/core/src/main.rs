fn main() {
    std::process::exit(hameig::cli::run(std::env::args_os()));
}

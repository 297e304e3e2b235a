fn main() {
    std::process::exit(helixlab::cli::run(std::env::args_os()));
}

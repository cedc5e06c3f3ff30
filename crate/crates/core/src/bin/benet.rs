fn main() {
    std::process::exit(benet::cli::run(std::env::args_os()));
}

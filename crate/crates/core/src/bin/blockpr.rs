fn main() {
    std::process::exit(blockpr::cli::cli(std::env::args_os()));
}

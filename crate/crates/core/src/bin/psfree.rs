fn main() {
    std::process::exit(psfree::cli::run(std::env::args_os()));
}

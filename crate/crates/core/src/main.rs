fn main() {
    std::process::exit(privcache::cli::run_from(std::env::args_os()));
}

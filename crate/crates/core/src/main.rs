fn main() {
    std::process::exit(solrad::cli::run(std::env::args_os()));
}

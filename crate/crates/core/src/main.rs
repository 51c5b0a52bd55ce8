fn main() {
    std::process::exit(kappareg::cli::run(std::env::args_os()));
}

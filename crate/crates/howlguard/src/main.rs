fn main() {
    std::process::exit(howlguard::cli::run(std::env::args_os()));
}

fn main() {
    std::process::exit(sentiment_market::cli::run_command(std::env::args_os()));
}

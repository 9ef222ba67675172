fn main() {
    std::process::exit(orlicz_embed::cli::run(std::env::args_os()));
}

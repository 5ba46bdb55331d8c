fn main() {
    std::process::exit(hyperbound::cli::run(std::env::args_os()));
}

fn main() {
    std::process::exit(ringspike::cli::run(std::env::args_os()));
}

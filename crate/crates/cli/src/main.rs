fn main() {
    std::process::exit(pdik_cli::run(std::env::args_os()));
}

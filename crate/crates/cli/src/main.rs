fn main() {
    std::process::exit(lowmach_cli::run(std::env::args_os()));
}

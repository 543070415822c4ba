fn main() {
    std::process::exit(satscale_cli::run(std::env::args_os()));
}

fn main() {
    std::process::exit(bvac_cli::run(std::env::args_os()));
}

fn main() {
    std::process::exit(ergomfg::cli::run(std::env::args_os()));
}

fn main() {
    std::process::exit(mhmvol::cli::run(std::env::args_os()));
}

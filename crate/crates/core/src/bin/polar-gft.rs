fn main() {
    std::process::exit(polar_gft::cli::run(std::env::args_os()));
}

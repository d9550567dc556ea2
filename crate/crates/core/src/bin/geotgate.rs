fn main() {
    std::process::exit(geotgate::cli::run(std::env::args_os()));
}

fn main() {
    std::process::exit(qrange_io::cli::run(std::env::args_os()));
}

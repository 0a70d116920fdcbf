fn main() {
    std::process::exit(readmit::cli::run(std::env::args_os()));
}

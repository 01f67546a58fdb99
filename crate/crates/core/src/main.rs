fn main() {
    std::process::exit(qcayley::cli::run(std::env::args_os()));
}

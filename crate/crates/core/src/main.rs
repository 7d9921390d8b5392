fn main() {
    std::process::exit(weakseq::cli::run(std::env::args_os()));
}

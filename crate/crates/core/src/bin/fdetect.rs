fn main() {
    std::process::exit(fourier_detect::cli::run(std::env::args_os()));
}

fn main() {
    std::process::exit(zkernel::cli::run(std::env::args_os()));
}

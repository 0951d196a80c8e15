fn main() {
    std::process::exit(patmsts::cli::run(std::env::args_os()));
}

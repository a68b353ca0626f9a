fn main() {
    std::process::exit(bimult::cli::run(std::env::args_os()));
}

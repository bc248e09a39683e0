fn main() {
    std::process::exit(wente_lab::experiments::cli::run(std::env::args_os()));
}

fn main() {
    std::process::exit(rqc_cli::execute(std::env::args_os()));
}

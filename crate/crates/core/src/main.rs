fn main() {
    std::process::exit(fraccontact::cli::run(std::env::args_os()));
}

fn main() {
    std::process::exit(headingdet::run(std::env::args_os()));
}

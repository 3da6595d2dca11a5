fn main() {
    std::process::exit(dualfb::run(std::env::args_os()));
}

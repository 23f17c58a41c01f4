fn main() {
    std::process::exit(mirrorkit::run(std::env::args_os()));
}

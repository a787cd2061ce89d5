fn main() {
    std::process::exit(kakeya_lab::run(std::env::args_os()));
}

fn main() {
    std::process::exit(muxcast::cli::run());
}

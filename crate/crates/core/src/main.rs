fn main() {
    std::process::exit(spinboson::cli::run());
}

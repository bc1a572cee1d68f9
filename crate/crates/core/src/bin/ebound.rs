fn main() {
    std::process::exit(ebound::cli::run());
}

fn main() {
    std::process::exit(klehmer::cli::run(std::env::args()));
}

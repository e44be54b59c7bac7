fn main() {
    std::process::exit(wkbsolve::cli::run());
}

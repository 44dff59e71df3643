fn main() {
    std::process::exit(superdescent::commands::run());
}

fn main() {
    std::process::exit(typedebug::session::cli::main_with_args(std::env::args()));
}

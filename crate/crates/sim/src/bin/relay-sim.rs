fn main() {
    std::process::exit(relay_sim::cli::main_with(std::env::args_os()));
}

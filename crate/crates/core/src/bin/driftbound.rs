fn main() {
    std::process::exit(driftbound::cli::main_with_args(std::env::args_os()));
}

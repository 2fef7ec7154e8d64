fn main() {
    std::process::exit(chord_sim::cli::main_with_args(std::env::args_os()));
}

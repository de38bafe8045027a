fn main() {
    std::process::exit(qreduce_cli::main_with_args(std::env::args_os()));
}

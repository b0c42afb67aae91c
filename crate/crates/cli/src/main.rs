fn main() {
    std::process::exit(endslab_cli::main_with_args(std::env::args_os()));
}

fn main() -> std::process::ExitCode {
    geodiam::cli::main_with_args(std::env::args_os())
}

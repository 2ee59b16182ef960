fn main() -> std::process::ExitCode {
    g2flow::cli::main_with_args(std::env::args_os())
}

fn main() -> std::process::ExitCode {
    pimwnn::cli::main_with(std::env::args_os())
}

fn main() -> std::process::ExitCode {
    sglv::cli::main(std::env::args_os())
}

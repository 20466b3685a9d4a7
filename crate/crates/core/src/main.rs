use std::process::ExitCode;

fn main() -> ExitCode {
    zkmc::cli::run(std::env::args_os())
}

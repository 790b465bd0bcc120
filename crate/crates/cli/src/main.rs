use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(ilrc::cli::run(std::env::args_os()))
}

use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(ecfkg::cli::execute(std::env::args_os()) as u8)
}

use std::process::ExitCode;

fn main() -> ExitCode {
    let code = indoor_pdr::cli::run(std::env::args_os());
    ExitCode::from(code as u8)
}

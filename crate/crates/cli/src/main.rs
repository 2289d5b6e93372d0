use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(selfsim_cli::run(std::env::args_os()))
}

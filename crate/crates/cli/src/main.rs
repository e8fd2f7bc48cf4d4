use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(qsmooth::run(std::env::args_os()))
}

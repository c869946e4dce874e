use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(prefopt_cli::run(std::env::args_os()))
}

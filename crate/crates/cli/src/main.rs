use std::process::ExitCode;

fn main() -> ExitCode {
    pme_cli::main_with(std::env::args_os())
}

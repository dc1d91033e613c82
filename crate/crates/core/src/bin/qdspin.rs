use std::process::ExitCode;

fn main() -> ExitCode {
    qdspin::cli::main_with_args(std::env::args_os())
}

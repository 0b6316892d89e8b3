use std::process::ExitCode;

fn main() -> ExitCode {
    ddp::cli::main(std::env::args_os())
}

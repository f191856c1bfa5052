use std::process::ExitCode;

fn main() -> ExitCode {
    gridntl::cli::run(std::env::args_os())
}

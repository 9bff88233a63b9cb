use std::process::ExitCode;

fn main() -> ExitCode {
    pathcheck::cli::run()
}

use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(orbitzeta::cli::main_entry())
}

use std::process::ExitCode;

fn main() -> ExitCode {
    cgw::cli::main_entry()
}

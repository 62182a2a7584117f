use std::process::ExitCode;

fn main() -> ExitCode {
    colligations::cli::main()
}

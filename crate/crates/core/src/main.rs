use std::process::ExitCode;

fn main() -> ExitCode {
    robust_factor::cli::main()
}

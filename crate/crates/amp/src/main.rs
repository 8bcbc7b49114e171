use std::process::ExitCode;

fn main() -> ExitCode {
    optomech_amp::cli::main()
}

use std::process::ExitCode;

fn main() -> ExitCode {
    balance_lens::cli::run()
}
